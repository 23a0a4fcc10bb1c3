use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SampledMultifunction;
use crate::error::{Error, Result};
use crate::modulus::ModulusValue;

/// Refinement schedule shared by all estimators.
///
/// Level `k` of the local moduli looks at parameters with `d(y, ȳ) ≤ radii[k]`;
/// uniform calmness additionally requires `d(x, M(ȳ)) ≤ epsilons[k]` and the
/// calmness at an anchor `x̄` requires `d(x, x̄) ≤ anchor_radii[k]`. Level `k`
/// of the Hoffman estimate looks at `d(y, ȳ) ≤ global_radii[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub radii: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub anchor_radii: Vec<f64>,
    pub samples_per_level: usize,
    pub global_radii: Vec<f64>,
    pub global_samples: usize,
    pub max_anchors: usize,
    pub cap: f64,
    pub seed: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::geometric(8)
    }
}

impl Schedule {
    /// `δ_k = 10⁻ᵏ`, `ε_k = 0.45·0.8^(k−1)`, `ρ_k = ε_k/2`, `Γ_k = 10^(k−5)`.
    pub fn geometric(levels: usize) -> Self {
        let radii: Vec<f64> = (1..=levels).map(|k| 10f64.powi(-(k as i32))).collect();
        let epsilons: Vec<f64> = (0..levels).map(|k| 0.45 * 0.8f64.powi(k as i32)).collect();
        Schedule {
            anchor_radii: epsilons.iter().map(|e| e / 2.0).collect(),
            radii,
            epsilons,
            samples_per_level: 200,
            global_radii: (1..=levels).map(|k| 10f64.powi(k as i32 - 5)).collect(),
            global_samples: 2000,
            max_anchors: 64,
            cap: 1e6,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, per_level: usize, global: usize) -> Self {
        self.samples_per_level = per_level;
        self.global_samples = global;
        self
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }

    pub fn levels(&self) -> usize {
        self.radii.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSchedule(m.to_string()));
        let l = self.radii.len();
        if l == 0 {
            return bad("at least one level is required");
        }
        if self.epsilons.len() != l || self.anchor_radii.len() != l || self.global_radii.len() != l {
            return bad("all level lists must have the same length");
        }
        let all = self
            .radii
            .iter()
            .chain(&self.epsilons)
            .chain(&self.anchor_radii)
            .chain(&self.global_radii);
        if all.clone().any(|v| !v.is_finite() || *v <= 0.0) {
            return bad("radii must be positive and finite");
        }
        let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
        if !nonincreasing(&self.radii) || !nonincreasing(&self.epsilons) || !nonincreasing(&self.anchor_radii) {
            return bad("local radii must shrink along the schedule");
        }
        if !self.global_radii.windows(2).all(|w| w[1] >= w[0]) {
            return bad("global radii must grow along the schedule");
        }
        if self.anchor_radii.iter().zip(&self.epsilons).any(|(r, e)| r > e) {
            return bad("anchor radii may not exceed the enlargements");
        }
        if self.samples_per_level == 0 {
            return bad("samples per level must be positive");
        }
        if self.cap.is_nan() || self.cap <= 0.0 {
            return bad("cap must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelEstimate {
    pub radius: f64,
    pub epsilon: Option<f64>,
    /// Graph points that entered this level.
    pub pairs: usize,
    pub value: ModulusValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModulusEstimate {
    /// Value at the last level; a lower bound for the modulus.
    pub value: ModulusValue,
    /// The cap was exceeded on the last two levels.
    pub diverged: bool,
    pub levels: Vec<LevelEstimate>,
}

impl ModulusEstimate {
    fn from_levels(levels: Vec<LevelEstimate>, cap: f64) -> Self {
        let value = levels.last().map_or(ModulusValue::ZERO, |l| l.value);
        let n = levels.len();
        let diverged = n >= 2 && levels[n - 2..].iter().all(|l| l.value.value() > cap);
        ModulusEstimate {
            value,
            diverged,
            levels,
        }
    }

    /// `+∞` when divergence was declared, otherwise the last level value.
    pub fn modulus(&self) -> ModulusValue {
        if self.diverged {
            ModulusValue::Infinite
        } else {
            self.value
        }
    }

    /// Largest value over all levels.
    pub fn peak(&self) -> ModulusValue {
        ModulusValue::sup(self.levels.iter().map(|l| l.value))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuliEstimates {
    pub name: String,
    pub y_bar: Vec<f64>,
    /// Calmness at each anchor point of `M(ȳ)`.
    pub clm: Vec<(Vec<f64>, ModulusEstimate)>,
    pub sup_clm: ModulusEstimate,
    /// Uniform calmness in neighborhood form.
    pub uclm: ModulusEstimate,
    /// Uniform calmness in enlargement form, `d(x, M(ȳ)) / d(ȳ, M⁻¹(x))` over
    /// `x ∈ B(M(ȳ), ε)`; present when the inverse is available.
    pub uclm_ball: Option<ModulusEstimate>,
    pub lipusc: ModulusEstimate,
    pub hof: ModulusEstimate,
    pub schedule: Schedule,
    pub graph_pairs: usize,
    /// Samples with an empty image or a failed distance evaluation.
    pub skipped: usize,
}

impl ModuliEstimates {
    /// `sup clm`, `uclm`, `Lipusc`, `Hof` in chain order.
    pub fn chain(&self) -> [(&'static str, &ModulusEstimate); 4] {
        [
            ("sup_clm", &self.sup_clm),
            ("uclm", &self.uclm),
            ("lipusc", &self.lipusc),
            ("hof", &self.hof),
        ]
    }

    /// Checks the chain level by level for the local moduli and at the last
    /// level against `Hof`, with relative and absolute slack `noise`.
    pub fn check_chain(&self, noise: f64) -> Result<()> {
        let le = |a: ModulusValue, b: ModulusValue| a.value() <= b.value() * (1.0 + noise) + noise;
        let chain = self.chain();
        for w in chain[..3].windows(2) {
            let ((lname, lhs), (_, rhs)) = (w[0], w[1]);
            for (l, r) in lhs.levels.iter().zip(&rhs.levels) {
                if !le(l.value, r.value) {
                    return Err(violation(lname, l.value, r.value, &self.y_bar));
                }
            }
        }
        for w in chain.windows(2) {
            let ((lname, lhs), (_, rhs)) = (w[0], w[1]);
            if !le(lhs.value, rhs.value) {
                return Err(violation(lname, lhs.value, rhs.value, &self.y_bar));
            }
        }
        Ok(())
    }
}

fn violation(name: &'static str, lhs: ModulusValue, rhs: ModulusValue, y: &[f64]) -> Error {
    Error::ChainViolation {
        check: match name {
            "sup_clm" => "sup clm bounded by uclm",
            "uclm" => "uclm bounded by lipusc",
            _ => "lipusc bounded by hof",
        },
        lhs: lhs.value(),
        rhs: rhs.value(),
        sample: y.to_vec(),
    }
}

struct Pair {
    dy: f64,
    x: Vec<f64>,
    e: f64,
    ratio: ModulusValue,
}

/// Number of leading entries of a nonincreasing list that are `≥ v`.
fn levels_within(v: f64, bounds: &[f64]) -> usize {
    bounds.iter().take_while(|&&b| v <= b).count()
}

fn draw_around(rng: &mut ChaCha8Rng, center: &[f64], radius: f64, on_sphere: bool) -> Vec<f64> {
    let mut u: Vec<f64> = center.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
    if on_sphere {
        let m = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m > 0.0 {
            u.iter_mut().for_each(|v| *v /= m);
        }
    }
    center.iter().zip(&u).map(|(c, v)| c + radius * v).collect()
}

/// Level values from per-pair entry levels: `suffix` means a pair counted at
/// level `k` is also counted at every coarser level.
fn accumulate(
    entries: impl Iterator<Item = (usize, ModulusValue)>,
    levels: usize,
    suffix: bool,
) -> (Vec<ModulusValue>, Vec<usize>) {
    let mut best = vec![ModulusValue::ZERO; levels + 1];
    let mut count = vec![0usize; levels + 1];
    for (k, v) in entries {
        best[k] = best[k].max(v);
        count[k] += 1;
    }
    if suffix {
        // entry k = number of levels the pair belongs to, i.e. levels 0..k
        let mut vals = vec![ModulusValue::ZERO; levels];
        let mut counts = vec![0; levels];
        let (mut run, mut c) = (ModulusValue::ZERO, 0);
        for k in (1..=levels).rev() {
            run = run.max(best[k]);
            c += count[k];
            vals[k - 1] = run;
            counts[k - 1] = c;
        }
        (vals, counts)
    } else {
        // entry k = first level the pair belongs to; `levels` means none
        let mut vals = vec![ModulusValue::ZERO; levels];
        let mut counts = vec![0; levels];
        let (mut run, mut c) = (ModulusValue::ZERO, 0);
        for k in 0..levels {
            run = run.max(best[k]);
            c += count[k];
            vals[k] = run;
            counts[k] = c;
        }
        (vals, counts)
    }
}

fn build(vals: Vec<ModulusValue>, counts: Vec<usize>, radii: &[f64], eps: Option<&[f64]>, cap: f64) -> ModulusEstimate {
    let levels = vals
        .into_iter()
        .zip(counts)
        .enumerate()
        .map(|(k, (value, pairs))| LevelEstimate {
            radius: radii[k],
            epsilon: eps.map(|e| e[k]),
            pairs,
            value,
        })
        .collect();
    ModulusEstimate::from_levels(levels, cap)
}

/// Estimates all four moduli of `m` at its nominal parameter.
///
/// Samples are drawn serially from one seeded stream and evaluated in
/// parallel; every reduction is order independent, so results depend only on
/// the multifunction and the schedule.
pub fn estimate_moduli(m: &SampledMultifunction, schedule: &Schedule) -> Result<ModuliEstimates> {
    schedule.validate()?;
    let levels = schedule.levels();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);

    let mut ys = Vec::with_capacity(levels * schedule.samples_per_level + schedule.global_samples);
    for &delta in &schedule.radii {
        for _ in 0..schedule.samples_per_level {
            let sphere = rng.random_bool(0.25);
            ys.push(draw_around(&mut rng, &m.y_bar, delta, sphere));
        }
    }
    for _ in 0..schedule.global_samples {
        let j = rng.random_range(0..levels);
        let lo = if j == 0 { 0.0 } else { schedule.global_radii[j - 1] };
        let r = rng.random_range(lo..=schedule.global_radii[j]);
        ys.push(draw_around(&mut rng, &m.y_bar, r, true));
    }

    let per_y: Vec<Vec<Pair>> = ys
        .par_iter()
        .map(|y| {
            let dy = m.y_norm.distance(y, &m.y_bar);
            m.evaluate(y)
                .into_iter()
                .map(|x| {
                    let e = m.nominal_distance(&x);
                    let ratio = if dy == 0.0 {
                        ModulusValue::ZERO
                    } else {
                        ModulusValue::ratio(e, dy)
                    };
                    Pair { dy, x, e, ratio }
                })
                .collect()
        })
        .collect();
    let mut skipped = per_y.iter().filter(|p| p.is_empty()).count();
    let mut pairs: Vec<Pair> = per_y.into_iter().flatten().collect();
    let before = pairs.len();
    pairs.retain(|p| !p.e.is_nan());
    skipped += before - pairs.len();

    let cap = schedule.cap;
    let radii = &schedule.radii[..];
    let eps = &schedule.epsilons[..];

    let (v, c) = accumulate(
        pairs.iter().map(|p| (levels_within(p.dy, radii), p.ratio)),
        levels,
        true,
    );
    let lipusc = build(v, c, radii, None, cap);

    let (v, c) = accumulate(
        pairs
            .iter()
            .map(|p| (levels_within(p.dy, radii).min(levels_within(p.e, eps)), p.ratio)),
        levels,
        true,
    );
    let uclm = build(v, c, radii, Some(eps), cap);

    let (v, c) = accumulate(
        pairs
            .iter()
            .map(|p| (schedule.global_radii.iter().take_while(|&&g| p.dy > g).count(), p.ratio)),
        levels,
        false,
    );
    let hof = build(v, c, &schedule.global_radii, None, cap);

    let anchors: Vec<Vec<f64>> = m.evaluate(&m.y_bar).into_iter().take(schedule.max_anchors).collect();
    let clm: Vec<(Vec<f64>, ModulusEstimate)> = anchors
        .par_iter()
        .map(|a| {
            let (v, c) = accumulate(
                pairs.iter().map(|p| {
                    let k = levels_within(p.dy, radii)
                        .min(levels_within(m.x_norm.distance(&p.x, a), &schedule.anchor_radii));
                    (k, p.ratio)
                }),
                levels,
                true,
            );
            (a.clone(), build(v, c, radii, Some(&schedule.anchor_radii), cap))
        })
        .collect();
    let sup_levels: Vec<LevelEstimate> = (0..levels)
        .map(|k| LevelEstimate {
            radius: radii[k],
            epsilon: Some(schedule.anchor_radii[k]),
            pairs: clm.iter().map(|(_, e)| e.levels[k].pairs).sum(),
            value: ModulusValue::sup(clm.iter().map(|(_, e)| e.levels[k].value)),
        })
        .collect();
    let sup_clm = ModulusEstimate::from_levels(sup_levels, cap);

    let uclm_ball = match anchors.first() {
        Some(a) if m.inverse_distance(a).is_some() => {
            let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(levels * schedule.samples_per_level);
            for &e in eps {
                for _ in 0..schedule.samples_per_level {
                    let a = &anchors[rng.random_range(0..anchors.len())];
                    candidates.push(draw_around(&mut rng, a, e, false));
                }
            }
            let extra: Vec<(f64, ModulusValue)> = candidates
                .par_iter()
                .map(|x| m.nominal_distance(x))
                .zip(candidates.par_iter())
                .map(|(e, x)| (e, x))
                .chain(pairs.par_iter().map(|p| (p.e, &p.x)))
                .filter(|(e, _)| !e.is_nan())
                .map(|(e, x)| {
                    let inv = m.inverse_distance(x).unwrap_or(f64::INFINITY);
                    (e, ModulusValue::ratio(e, inv))
                })
                .collect();
            let (v, c) = accumulate(extra.into_iter().map(|(e, r)| (levels_within(e, eps), r)), levels, true);
            Some(build(v, c, eps, Some(eps), cap))
        }
        _ => None,
    };

    Ok(ModuliEstimates {
        name: m.name.clone(),
        y_bar: m.y_bar.clone(),
        clm,
        sup_clm,
        uclm,
        uclm_ball,
        lipusc,
        hof,
        schedule: schedule.clone(),
        graph_pairs: pairs.len(),
        skipped,
    })
}
