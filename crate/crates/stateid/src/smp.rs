//! Simultaneous-message-passing protocol simulation: the shared-randomness
//! and private-randomness protocols for the index problem P1, the
//! entanglement protocol and its sublinear variant for the matching parity
//! problem P2, a small statevector simulator, and the random-access-code
//! bound calculator.
//!
//! Indices are 0-based internally and in the public API; matching edges
//! connect the two halves of `0..n`.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmpError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, SmpError>;

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(SmpError::InvalidInput(msg.into()))
    }
}

fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

fn check_bits(v: &[u8], name: &str) -> Result<()> {
    require(
        v.iter().all(|&b| b <= 1),
        &format!("{name} must contain only bits"),
    )
}

// ---------------------------------------------------------------------------
// inputs
// ---------------------------------------------------------------------------

/// P1: Alice holds `x` and a selector `s` of weight exactly n/2, Bob holds
/// `y`; the referee must output `(i, x_i, y_i)` for some `i` with `s_i = 1`.
#[derive(Debug, Clone)]
pub struct P1Input {
    pub n: usize,
    pub x: Vec<u8>,
    pub s: Vec<u8>,
    pub y: Vec<u8>,
}

impl P1Input {
    pub fn new(x: Vec<u8>, s: Vec<u8>, y: Vec<u8>) -> Result<Self> {
        let n = x.len();
        require(is_power_of_two(n), "n must be a power of two")?;
        require(s.len() == n && y.len() == n, "x, s, y must share a length")?;
        check_bits(&x, "x")?;
        check_bits(&s, "s")?;
        check_bits(&y, "y")?;
        let weight: usize = s.iter().map(|&b| b as usize).sum();
        require(weight == n / 2, "s must have Hamming weight exactly n/2")?;
        Ok(P1Input { n, x, s, y })
    }
}

/// A perfect matching on `[n]`, stored as disjoint index pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(edges: Vec<(usize, usize)>, n: usize) -> Result<Self> {
        require(n % 2 == 0 && edges.len() == n / 2, "need n/2 edges")?;
        let mut seen = vec![false; n];
        for &(i, j) in &edges {
            require(i < n && j < n && i != j, "edge out of range")?;
            require(!seen[i] && !seen[j], "matching must be disjoint")?;
            seen[i] = true;
            seen[j] = true;
        }
        Ok(Matching { edges })
    }

    /// The edge containing index `i`, if any, with its position.
    pub fn edge_of(&self, i: usize) -> Option<(usize, (usize, usize))> {
        self.edges
            .iter()
            .enumerate()
            .find(|&(_, &(a, b))| a == i || b == i)
            .map(|(k, &e)| (k, e))
    }
}

/// The k-th member of the standard family of pairwise edge-disjoint perfect
/// matchings between the two halves of `[n]`: edge `(i, ((i+k) mod n/2) + n/2)`
/// for `i = 0..n/2`.
pub fn gen_matching(k: usize, n: usize) -> Result<Matching> {
    require(n >= 2 && n % 2 == 0, "n must be even and at least 2")?;
    let half = n / 2;
    require(k < half, "k must satisfy 0 <= k < n/2")?;
    let edges = (0..half).map(|i| (i, ((i + k) % half) + half)).collect();
    Matching::new(edges, n)
}

/// P2: Alice holds a perfect matching and one bit per edge, Bob holds `y`;
/// the referee must output `(i, j, x_(i,j), y_i xor y_j)` for some edge.
#[derive(Debug, Clone)]
pub struct P2Input {
    pub n: usize,
    pub matching: Matching,
    pub edge_bits: Vec<u8>,
    pub y: Vec<u8>,
}

impl P2Input {
    pub fn new(matching: Matching, edge_bits: Vec<u8>, y: Vec<u8>) -> Result<Self> {
        let n = y.len();
        require(is_power_of_two(n), "n must be a power of two")?;
        // Re-validate the matching against this n.
        Matching::new(matching.edges.clone(), n)?;
        require(edge_bits.len() == n / 2, "one bit per matching edge")?;
        check_bits(&edge_bits, "edge_bits")?;
        check_bits(&y, "y")?;
        Ok(P2Input {
            n,
            matching,
            edge_bits,
            y,
        })
    }
}

// ---------------------------------------------------------------------------
// transcripts
// ---------------------------------------------------------------------------

/// Communication tally. Shared randomness and EPR pairs are recorded but do
/// not count towards the message cost.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MessageCost {
    pub alice_bits: usize,
    pub bob_bits: usize,
    pub alice_qubits: usize,
    pub bob_qubits: usize,
    pub shared_random_bits: usize,
    pub epr_pairs: usize,
}

impl MessageCost {
    /// Total counted communication (classical bits plus qubits).
    pub fn total(&self) -> usize {
        self.alice_bits + self.bob_bits + self.alice_qubits + self.bob_qubits
    }
}

/// What the referee announced: a proper answer, a fixed fallback guess, or
/// an explicit failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefereeOutput<O> {
    Answer(O),
    Fallback(O),
    Fail,
}

#[derive(Debug, Clone)]
pub struct Transcript<O> {
    pub cost: MessageCost,
    pub output: RefereeOutput<O>,
    /// Whether the output is a correct answer for the input.
    pub valid: bool,
}

/// P1 answer: an index with its two input bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct P1Output {
    pub i: usize,
    pub x_bit: u8,
    pub y_bit: u8,
}

/// P2 answer: a matching edge, its bit, and the parity of Bob's bits on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct P2Output {
    pub i: usize,
    pub j: usize,
    pub edge_bit: u8,
    pub parity: u8,
}

pub fn validate_p1(input: &P1Input, out: &P1Output) -> bool {
    out.i < input.n
        && input.s[out.i] == 1
        && out.x_bit == input.x[out.i]
        && out.y_bit == input.y[out.i]
}

pub fn validate_p2(input: &P2Input, out: &P2Output) -> bool {
    let Some((k, (a, b))) = input.matching.edge_of(out.i) else {
        return false;
    };
    ((out.i, out.j) == (a, b) || (out.i, out.j) == (b, a))
        && out.edge_bit == input.edge_bits[k]
        && out.parity == input.y[out.i] ^ input.y[out.j]
}

fn log2(n: usize) -> usize {
    n.trailing_zeros() as usize
}

// ---------------------------------------------------------------------------
// P1 protocols
// ---------------------------------------------------------------------------

/// Shared-randomness protocol: both parties report the bits of `r` shared
/// random indices; the referee answers on the first index selected by `s`.
/// Each index hits `s` with probability exactly 1/2, so the failure
/// probability is exactly `2^{-r}`.
pub fn p1_pub_protocol(input: &P1Input, r: usize, rng: &mut impl Rng) -> Result<Transcript<P1Output>> {
    require(r >= 1, "need at least one repetition")?;
    let idx_bits = log2(input.n);
    let indices: Vec<usize> = (0..r).map(|_| rng.gen_range(0..input.n)).collect();
    let cost = MessageCost {
        // Alice: (i, x_i, s_i) per index; Bob: (i, y_i).
        alice_bits: r * (idx_bits + 2),
        bob_bits: r * (idx_bits + 1),
        shared_random_bits: r * idx_bits,
        ..MessageCost::default()
    };
    let hit = indices.iter().find(|&&i| input.s[i] == 1);
    let (output, valid) = match hit {
        Some(&i) => {
            let out = P1Output {
                i,
                x_bit: input.x[i],
                y_bit: input.y[i],
            };
            let ok = validate_p1(input, &out);
            (RefereeOutput::Answer(out), ok)
        }
        None => (
            // Fixed fallback guess; reproducible, and flagged as a guess.
            RefereeOutput::Fallback(P1Output {
                i: 0,
                x_bit: 0,
                y_bit: 0,
            }),
            false,
        ),
    };
    Ok(Transcript {
        cost,
        output,
        valid,
    })
}

/// Private-randomness protocol: inputs arranged in a sqrt(n) x sqrt(n)
/// matrix; per repetition Alice sends a random row of `x` and `s`, Bob a
/// random column of `y`, and the intersection index is uniform on `[n]`, so
/// each repetition succeeds with probability exactly 1/2.
pub fn p1_private_sqrt(
    input: &P1Input,
    reps: usize,
    rng: &mut impl Rng,
) -> Result<Transcript<P1Output>> {
    require(reps >= 1, "need at least one repetition")?;
    let m = (input.n as f64).sqrt().round() as usize;
    require(m * m == input.n, "n must be a perfect square")?;
    let idx_bits = log2(input.n) / 2;
    let cost = MessageCost {
        // Alice: row index plus a row of x and of s; Bob: column index
        // plus a column of y.
        alice_bits: reps * (idx_bits + 2 * m),
        bob_bits: reps * (idx_bits + m),
        ..MessageCost::default()
    };
    for _ in 0..reps {
        let row = rng.gen_range(0..m);
        let col = rng.gen_range(0..m);
        let i = row * m + col;
        if input.s[i] == 1 {
            let out = P1Output {
                i,
                x_bit: input.x[i],
                y_bit: input.y[i],
            };
            let ok = validate_p1(input, &out);
            return Ok(Transcript {
                cost,
                output: RefereeOutput::Answer(out),
                valid: ok,
            });
        }
    }
    Ok(Transcript {
        cost,
        output: RefereeOutput::Fallback(P1Output {
            i: 0,
            x_bit: 0,
            y_bit: 0,
        }),
        valid: false,
    })
}

// ---------------------------------------------------------------------------
// statevector simulator
// ---------------------------------------------------------------------------

/// Dense state vector over a power-of-two dimension.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        require(is_power_of_two(amps.len()), "dimension must be a power of two")?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        require(
            (norm_sq.sqrt() - 1.0).abs() <= 1e-12,
            "state vector must be normalized",
        )?;
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The maximally entangled state `(1/sqrt(n)) sum_i |i>|i>` on two
    /// `n`-dimensional registers (index `i*n + j`).
    pub fn entangled_pair(n: usize) -> Result<Self> {
        require(is_power_of_two(n), "register dimension must be a power of two")?;
        let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        for i in 0..n {
            amps[i * n + i] = a;
        }
        Ok(StateVector { amps })
    }

    /// Multiplies the amplitude of every index selected by the predicate
    /// by -1 (a classical-data phase oracle).
    pub fn phase_flip(&mut self, flip: impl Fn(usize) -> bool) {
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if flip(idx) {
                *a = -*a;
            }
        }
    }

    /// Hadamard on every qubit (a normalized Walsh-Hadamard transform).
    pub fn hadamard_all(&mut self) {
        let n = self.amps.len();
        let mut h = 1;
        let scale = 1.0 / (n as f64).sqrt();
        while h < n {
            let mut i = 0;
            while i < n {
                for j in i..i + h {
                    let a = self.amps[j];
                    let b = self.amps[j + h];
                    self.amps[j] = a + b;
                    self.amps[j + h] = a - b;
                }
                i += 2 * h;
            }
            h *= 2;
        }
        for a in &mut self.amps {
            *a *= scale;
        }
    }

    /// Probability of each computational-basis outcome.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Projects onto the span of the given basis indices: returns the
    /// outcome probability and the renormalized post-measurement state,
    /// or `None` for a zero-probability outcome.
    pub fn project(&self, keep: &[usize]) -> Option<(f64, StateVector)> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut p = 0.0;
        for &idx in keep {
            amps[idx] = self.amps[idx];
            p += self.amps[idx].norm_sqr();
        }
        if p <= 0.0 {
            return None;
        }
        let s = Complex64::new(1.0 / p.sqrt(), 0.0);
        for a in &mut amps {
            *a *= s;
        }
        Some((p, StateVector { amps }))
    }

    /// Samples a computational-basis outcome.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let mut u: f64 = rng.gen_range(0.0..1.0);
        for (idx, a) in self.amps.iter().enumerate() {
            u -= a.norm_sqr();
            if u <= 0.0 {
                return idx;
            }
        }
        self.amps.len() - 1
    }
}

/// GF(2) inner product of the binary encodings of two labels.
fn dot2(a: usize, b: usize) -> u8 {
    ((a & b).count_ones() & 1) as u8
}

// ---------------------------------------------------------------------------
// P2 protocols
// ---------------------------------------------------------------------------

/// One support point of the exact output distribution of the entanglement
/// protocol.
#[derive(Debug, Clone)]
pub struct P2OutcomePoint {
    pub probability: f64,
    pub output: P2Output,
    pub valid: bool,
}

/// Exact output distribution plus the overall success probability.
#[derive(Debug, Clone)]
pub struct P2Distribution {
    pub points: Vec<P2OutcomePoint>,
    pub success: f64,
    pub cost: MessageCost,
}

fn p2_cost(n: usize) -> MessageCost {
    let l = log2(n);
    MessageCost {
        // Alice: edge endpoints, its bit, and her l measured bits;
        // Bob: his l measured bits.
        alice_bits: 2 * l + 1 + l,
        bob_bits: l,
        epr_pairs: l,
        ..MessageCost::default()
    }
}

/// Runs the entanglement protocol exactly, enumerating every measurement
/// branch: shared state `(1/sqrt(n)) sum |i>|i>`, Bob's phase oracle
/// `(-1)^{y_i}`, Alice's edge-projector measurement, Hadamards on every
/// qubit, and computational measurements `(k, l)` satisfying
/// `(k xor l) . (i xor j) = y_i xor y_j`; the referee's output is correct
/// with probability 1.
pub fn p2_entangled_exact(input: &P2Input) -> Result<P2Distribution> {
    let n = input.n;
    let mut state = StateVector::entangled_pair(n)?;
    // Bob's bits enter as phases on his register (index = i*n + j).
    let y = input.y.clone();
    state.phase_flip(|idx| y[idx % n] == 1);

    let mut points = Vec::new();
    let mut success = 0.0;
    for (e, &(i, j)) in input.matching.edges.iter().enumerate() {
        // Alice measures E_ij = |i><i| + |j><j| on her register.
        let keep: Vec<usize> = (0..n).flat_map(|b| [i * n + b, j * n + b]).collect();
        let Some((p_edge, collapsed)) = state.project(&keep) else {
            continue;
        };
        let mut branch = collapsed;
        branch.hadamard_all();
        for (idx, p) in branch.probabilities().into_iter().enumerate() {
            if p <= 1e-24 {
                continue;
            }
            let (k, l) = (idx / n, idx % n);
            let parity = dot2(k ^ l, i ^ j);
            let output = P2Output {
                i,
                j,
                edge_bit: input.edge_bits[e],
                parity,
            };
            let valid = validate_p2(input, &output);
            let probability = p_edge * p;
            if valid {
                success += probability;
            }
            points.push(P2OutcomePoint {
                probability,
                output,
                valid,
            });
        }
    }
    Ok(P2Distribution {
        points,
        success,
        cost: p2_cost(n),
    })
}

/// Samples one run of the entanglement protocol.
pub fn p2_entangled_sample(input: &P2Input, rng: &mut impl Rng) -> Result<Transcript<P2Output>> {
    let n = input.n;
    let mut state = StateVector::entangled_pair(n)?;
    let y = input.y.clone();
    state.phase_flip(|idx| y[idx % n] == 1);

    // Alice's edge outcome is uniform: each projector captures 2/n of the
    // entangled state's weight.
    let e = rng.gen_range(0..input.matching.edges.len());
    let (i, j) = input.matching.edges[e];
    let keep: Vec<usize> = (0..n).flat_map(|b| [i * n + b, j * n + b]).collect();
    let (_, mut branch) = state
        .project(&keep)
        .expect("edge projectors have positive probability");
    branch.hadamard_all();
    let idx = branch.sample(rng);
    let (k, l) = (idx / n, idx % n);
    let output = P2Output {
        i,
        j,
        edge_bit: input.edge_bits[e],
        parity: dot2(k ^ l, i ^ j),
    };
    let valid = validate_p2(input, &output);
    Ok(Transcript {
        cost: p2_cost(n),
        output: RefereeOutput::Answer(output),
        valid,
    })
}

/// Sublinear protocol: a shared random subset `S`, Bob sending copies of
/// `(1/sqrt(|S|)) sum_{i in S} (-1)^{y_i} |i>`, and Alice sending the bits
/// of every matching edge inside `S`. The referee measures each copy with
/// the in-`S` edge projectors completed by a garbage projector; a
/// non-garbage outcome recovers the edge parity exactly via the
/// `|i> +- |j>` basis. Per-copy non-garbage probability is exactly
/// `2 * (edges inside S) / |S|`.
pub fn p2_sublinear(
    input: &P2Input,
    s_size: usize,
    copies: usize,
    rng: &mut impl Rng,
) -> Result<Transcript<P2Output>> {
    let n = input.n;
    require(s_size >= 1 && s_size <= n, "subset size must be in [1, n]")?;
    require(copies >= 1, "need at least one copy")?;

    // Shared random subset: Floyd-style sampling, then sorted for
    // determinism given the generator.
    let mut subset: Vec<usize> = (0..n).collect();
    for i in 0..s_size {
        let j = rng.gen_range(i..n);
        subset.swap(i, j);
    }
    subset.truncate(s_size);
    subset.sort_unstable();
    let in_s = {
        let mut f = vec![false; n];
        for &i in &subset {
            f[i] = true;
        }
        f
    };

    let inside: Vec<usize> = (0..input.matching.edges.len())
        .filter(|&e| {
            let (i, j) = input.matching.edges[e];
            in_s[i] && in_s[j]
        })
        .collect();
    let l = log2(n);
    let cost = MessageCost {
        alice_bits: inside.len() * (2 * l + 1),
        bob_qubits: copies * l,
        shared_random_bits: s_size * l,
        ..MessageCost::default()
    };

    if inside.is_empty() {
        return Ok(Transcript {
            cost,
            output: RefereeOutput::Fail,
            valid: false,
        });
    }
    // Per-copy non-garbage probability: each in-S edge projector captures
    // 2/|S| of the subset state.
    let p_ng = 2.0 * inside.len() as f64 / s_size as f64;
    for _ in 0..copies {
        if rng.gen_range(0.0..1.0) < p_ng {
            // Non-garbage: uniform among in-S edges; the +-basis measurement
            // on the collapsed (1/sqrt 2)((-1)^{y_i}|i> + (-1)^{y_j}|j>)
            // recovers y_i xor y_j with certainty.
            let e = inside[rng.gen_range(0..inside.len())];
            let (i, j) = input.matching.edges[e];
            let output = P2Output {
                i,
                j,
                edge_bit: input.edge_bits[e],
                parity: input.y[i] ^ input.y[j],
            };
            let valid = validate_p2(input, &output);
            return Ok(Transcript {
                cost,
                output: RefereeOutput::Answer(output),
                valid,
            });
        }
    }
    Ok(Transcript {
        cost,
        output: RefereeOutput::Fail,
        valid: false,
    })
}

/// Exact per-copy non-garbage probability of [`p2_sublinear`] for a given
/// subset, from the projector arithmetic rather than sampling.
pub fn p2_sublinear_nongarbage(input: &P2Input, subset: &[usize]) -> Result<f64> {
    let n = input.n;
    require(!subset.is_empty() && subset.len() <= n, "bad subset size")?;
    let mut in_s = vec![false; n];
    for &i in subset {
        require(i < n, "subset index out of range")?;
        in_s[i] = true;
    }
    let inside = input
        .matching
        .edges
        .iter()
        .filter(|&&(i, j)| in_s[i] && in_s[j])
        .count();
    Ok(2.0 * inside as f64 / subset.len() as f64)
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

/// Success fraction of a protocol run over independent trials, with the
/// binomial standard error. Deterministic under a fixed generator.
pub fn estimate_success<R: Rng>(
    trials: usize,
    rng: &mut R,
    mut run: impl FnMut(&mut R) -> bool,
) -> (f64, f64) {
    assert!(trials >= 1, "need at least one trial");
    let mut hits = 0usize;
    for _ in 0..trials {
        if run(rng) {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    let stderr = (rate * (1.0 - rate) / trials as f64).sqrt();
    (rate, stderr)
}

// ---------------------------------------------------------------------------
// random access code bound
// ---------------------------------------------------------------------------

/// Answer probability and conditional error of one predictor.
#[derive(Debug, Clone, Copy)]
pub struct PredictorSpec {
    pub lambda: f64,
    pub eps: f64,
}

impl PredictorSpec {
    pub fn new(lambda: f64, eps: f64) -> Result<Self> {
        require(
            (0.0..=1.0).contains(&lambda) && (0.0..=1.0).contains(&eps),
            "lambda and eps must lie in [0, 1]",
        )?;
        Ok(PredictorSpec { lambda, eps })
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    require((0.0..=1.0).contains(&x), "entropy argument must be in [0, 1]")?;
    let term = |t: f64| if t == 0.0 { 0.0 } else { -t * t.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// The random-access-code bound `sum_i lambda_i (1 - H(eps_i)) <= q`:
/// returns the left-hand side and whether the bound holds.
pub fn rac_bound(preds: &[PredictorSpec], q: f64) -> Result<(f64, bool)> {
    require(q >= 0.0, "q must be nonnegative")?;
    let mut lhs = 0.0;
    for p in preds {
        lhs += p.lambda * (1.0 - binary_entropy(p.eps)?);
    }
    Ok((lhs, lhs <= q))
}
