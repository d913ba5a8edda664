//! Small-blocklength Monte Carlo of the symmetrizing jammer against the
//! list decoder.
//!
//! Randomness: one 64-bit seed expands into ChaCha8 streams. Stream 0 draws
//! the codebook and stream `t + 1` drives trial `t`, so trials are
//! reproducible independently of each other.

mod decode;

pub use decode::{decode_list, ListDecoding, CANDIDATE_CAP, MAX_CODEWORDS};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{tuple_index, Avc, ConditionalChannel, Dist};
use crate::error::{Error, Result};
use crate::symmetry::strong_cost;

/// Draws per trial before the jammer gives up on meeting the budget.
pub const MAX_RESAMPLES: usize = 100;

/// Default feasibility margin `ε` in `λ_L(type) < Λ − ε`.
pub const DEFAULT_EPSILON: f64 = 0.5;

pub(crate) fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn within_budget(total: f64, n: usize, lambda: f64) -> bool {
    let cap = n as f64 * lambda;
    total <= cap + 1e-9 * cap.abs().max(1.0)
}

/// Constant-composition codebook.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Codebook {
    nx: usize,
    composition: Vec<usize>,
    codewords: Vec<Vec<usize>>,
}

impl Codebook {
    pub fn new(nx: usize, codewords: Vec<Vec<usize>>) -> Result<Self> {
        let n = codewords.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidArgument(
                "codebook needs a nonempty codeword".into(),
            ));
        }
        if codewords.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("codewords have unequal lengths".into()));
        }
        if codewords.iter().flatten().any(|&x| x >= nx) {
            return Err(Error::InvalidArgument(format!(
                "codeword symbol outside 0..{nx}"
            )));
        }
        let mut composition = vec![0; nx];
        for &x in &codewords[0] {
            composition[x] += 1;
        }
        Ok(Codebook {
            nx,
            composition,
            codewords,
        })
    }

    pub fn n(&self) -> usize {
        self.codewords[0].len()
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn codeword(&self, i: usize) -> &[usize] {
        &self.codewords[i]
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    /// Symbol counts of the first codeword; shared by all codewords of a
    /// constant-composition code.
    pub fn composition(&self) -> &[usize] {
        &self.composition
    }

    /// The composition as a distribution.
    pub fn input_type(&self) -> Dist {
        let n = self.n() as f64;
        Dist::new(self.composition.iter().map(|&c| c as f64 / n).collect())
            .expect("composition sums to n")
    }

    pub fn is_constant_composition(&self) -> bool {
        self.codewords.iter().all(|c| {
            let mut counts = vec![0; self.nx];
            for &x in c {
                counts[x] += 1;
            }
            counts == self.composition
        })
    }
}

/// Counts summing to `n` closest to `n·p`: floors, then one extra count to
/// the largest remainders, ties to the lower symbol.
pub fn round_composition(n: usize, p: &Dist) -> Vec<usize> {
    let scaled: Vec<f64> = p.as_slice().iter().map(|&v| v * n as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|v| v.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &x in order.iter().take(n.saturating_sub(assigned)) {
        counts[x] += 1;
    }
    counts
}

/// `count` independent uniform draws from the type class of the rounded
/// composition of `p`, using stream 0 of `seed`.
pub fn random_constant_composition_codebook(
    n: usize,
    count: usize,
    p: &Dist,
    seed: u64,
) -> Result<Codebook> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "empty type class at blocklength 0".into(),
        ));
    }
    if count == 0 {
        return Err(Error::InvalidArgument(
            "codebook needs at least one codeword".into(),
        ));
    }
    let counts = round_composition(n, p);
    let template: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(x, &c)| std::iter::repeat_n(x, c))
        .collect();
    let mut rng = rng_stream(seed, 0);
    let codewords = (0..count)
        .map(|_| {
            let mut c = template.clone();
            c.shuffle(&mut rng);
            c
        })
        .collect();
    Codebook::new(p.len(), codewords)
}

/// Per-tuple samplers for a jammer kernel.
struct KernelSampler {
    nx: usize,
    rows: Vec<WeightedIndex<f64>>,
}

impl KernelSampler {
    fn new(u: &ConditionalChannel) -> Result<Self> {
        let tuples = u.as_slice().len() / u.ns();
        let rows = (0..tuples)
            .map(|t| {
                WeightedIndex::new(u.row(t))
                    .map_err(|e| Error::InvalidChannel(format!("kernel row {t}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(KernelSampler { nx: u.nx(), rows })
    }

    fn draw(&self, codebook: &Codebook, jammed: &[usize], rng: &mut impl Rng) -> Vec<usize> {
        let mut xs = vec![0; jammed.len()];
        (0..codebook.n())
            .map(|t| {
                for (slot, &j) in xs.iter_mut().zip(jammed) {
                    *slot = codebook.codeword(j)[t];
                }
                self.rows[tuple_index(&xs, self.nx)].sample(rng)
            })
            .collect()
    }
}

fn check_jammer(codebook: &Codebook, jammed: &[usize], u: &ConditionalChannel) -> Result<()> {
    if jammed.len() != u.arity() {
        return Err(Error::Dimension(format!(
            "{} jamming codewords for a kernel of arity {}",
            jammed.len(),
            u.arity()
        )));
    }
    if u.nx() != codebook.nx() {
        return Err(Error::Dimension(
            "kernel and codebook input alphabets differ".into(),
        ));
    }
    if let Some(&j) = jammed.iter().find(|&&j| j >= codebook.len()) {
        return Err(Error::InvalidArgument(format!(
            "codeword index {j} out of range for {} codewords",
            codebook.len()
        )));
    }
    Ok(())
}

/// State sequence with `s_t ~ U(· | x_t(j_1), ..., x_t(j_L))` independently
/// over `t`, drawn from stream 0 of `seed`.
pub fn jammer_state_sequence(
    codebook: &Codebook,
    jammed: &[usize],
    u: &ConditionalChannel,
    seed: u64,
) -> Result<Vec<usize>> {
    check_jammer(codebook, jammed, u)?;
    let sampler = KernelSampler::new(u)?;
    Ok(sampler.draw(codebook, jammed, &mut rng_stream(seed, 0)))
}

/// Passes `x` through the channel under states `s`.
pub fn transmit(avc: &Avc, x: &[usize], s: &[usize], rng: &mut impl Rng) -> Result<Vec<usize>> {
    if x.len() != s.len() {
        return Err(Error::Dimension(
            "input and state sequences differ in length".into(),
        ));
    }
    x.iter()
        .zip(s)
        .map(|(&xt, &st)| {
            if xt >= avc.nx() || st >= avc.ns() {
                return Err(Error::InvalidArgument(format!(
                    "symbol pair ({xt}, {st}) out of range"
                )));
            }
            let row = WeightedIndex::new(avc.w_row(xt, st))
                .map_err(|e| Error::InvalidChannel(e.to_string()))?;
            Ok(row.sample(rng))
        })
        .collect()
}

/// Output law of one letter when `x` is sent and the jammer sees `jam`.
pub fn letter_output_law(avc: &Avc, u: &ConditionalChannel, x: usize, jam: &[usize]) -> Vec<f64> {
    let row = u.row_for(jam);
    (0..avc.ny())
        .map(|y| (0..avc.ns()).map(|s| row[s] * avc.w(x, s, y)).sum())
        .collect()
}

/// The lower bound `1/(L+1) − L/(N(L+1))` on the jammed average list error.
pub fn jammer_error_bound(codewords: usize, list_size: usize) -> f64 {
    let l = list_size as f64;
    1.0 / (l + 1.0) - l / (codewords as f64 * (l + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: usize,
    pub empirical_error: f64,
    /// `sqrt(p̂(1 − p̂)/trials)`.
    pub error_stderr: f64,
    /// Mean of `Σ l(s_t)/n` over the state sequences actually applied.
    pub mean_cost_per_symbol: f64,
    /// Fraction of jammer draws rejected for exceeding `nΛ`.
    pub budget_violation_rate: f64,
    pub resamples: usize,
    /// Trials whose decoded list was longer than `L` before truncation.
    pub over_list_trials: usize,
    pub bound: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JammerExperiment {
    pub list_size: usize,
    pub lambda: f64,
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
    /// When set, require `λ_L(type) < Λ − ε` before running.
    pub epsilon: Option<f64>,
}

impl JammerExperiment {
    /// Runs the trials: uniform message, uniform `L`-set of jamming
    /// codewords, budgeted jammer states, channel, list decoder.
    pub fn run(&self, avc: &Avc, codebook: &Codebook, u: &ConditionalChannel) -> Result<SimReport> {
        let l = self.list_size;
        if self.trials == 0 {
            return Err(Error::InvalidArgument(
                "at least one trial is required".into(),
            ));
        }
        if l == 0 || l > codebook.len() {
            return Err(Error::InvalidArgument(format!(
                "list size {l} with {} codewords",
                codebook.len()
            )));
        }
        if u.arity() != l || u.ns() != avc.ns() || u.nx() != avc.nx() {
            return Err(Error::Dimension(
                "jammer kernel does not match the channel and list size".into(),
            ));
        }
        if let Some(eps) = self.epsilon {
            let sc = strong_cost(avc, &codebook.input_type(), l)?;
            if !(sc.value < self.lambda - eps) {
                return Err(Error::InvalidArgument(format!(
                    "strong symmetrizing cost {} of the code type is not below {} - {eps}",
                    sc.value, self.lambda
                )));
            }
        }
        let sampler = KernelSampler::new(u)?;
        let n = codebook.n();
        let mut errors = 0usize;
        let mut cost_sum = 0.0;
        let mut draws = 0usize;
        let mut rejected = 0usize;
        let mut over_list_trials = 0usize;
        for trial in 0..self.trials {
            let mut rng = rng_stream(self.seed, trial as u64 + 1);
            let message = rng.gen_range(0..codebook.len());
            let jammed = rand::seq::index::sample(&mut rng, codebook.len(), l).into_vec();
            let mut accepted = None;
            for _ in 0..MAX_RESAMPLES {
                let s = sampler.draw(codebook, &jammed, &mut rng);
                draws += 1;
                let total: f64 = s.iter().map(|&st| avc.cost()[st]).sum();
                if within_budget(total, n, self.lambda) {
                    accepted = Some((s, total));
                    break;
                }
                rejected += 1;
            }
            let (s, total) = accepted.ok_or(Error::BudgetExhausted {
                attempts: MAX_RESAMPLES,
            })?;
            cost_sum += total / n as f64;
            let y = transmit(avc, codebook.codeword(message), &s, &mut rng)?;
            let decoded = decode_list(avc, codebook, &y, self.lambda, self.eta, l)?;
            if decoded.over_list {
                over_list_trials += 1;
            }
            if !decoded.list.contains(&message) {
                errors += 1;
            }
        }
        let t = self.trials as f64;
        let p_hat = errors as f64 / t;
        Ok(SimReport {
            trials: self.trials,
            empirical_error: p_hat,
            error_stderr: (p_hat * (1.0 - p_hat) / t).sqrt(),
            mean_cost_per_symbol: cost_sum / t,
            budget_violation_rate: rejected as f64 / draws as f64,
            resamples: rejected,
            over_list_trials,
            bound: jammer_error_bound(codebook.len(), l),
            seed: self.seed,
        })
    }
}
