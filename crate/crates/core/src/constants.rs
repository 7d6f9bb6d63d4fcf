//! The constants c_q and C_q from the variational formula
//! `q^{1-c_q} = inf_{0<y<1} (1 + y + … + y^{q-1}) / y^{(q-1)/3}`,
//! plus evaluators for every closed-form bound used alongside them:
//! the r_3(N) state of the art, the polynomial-method cap bound,
//! container parameters, the random-subset probability chain,
//! Varnavides-type counts, and the h-function technical conditions.
//!
//! Bounds are evaluated in base-2 log space; quantities like
//! 2^{n² · q^{n/2}} overflow any fixed-width float, so the reports carry
//! `log2_value` and only optionally a direct value.

use crate::error::{Error, Result};
use crate::fq;
use serde::Serialize;
use std::collections::BTreeMap;

/// Constants derived from the minimization for one prime power q.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QConstants {
    pub q: u64,
    pub y_star: f64,
    pub g_star: f64,
    pub c_q: f64,
    #[serde(rename = "C_q")]
    pub big_c_q: f64,
}

/// Uniform carrier for formula evaluations.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub log2_value: f64,
    /// Direct value when 2^log2_value is representable.
    pub value: Option<f64>,
}

fn report(name: &str, inputs: &[(&str, f64)], log2_value: f64) -> BoundReport {
    BoundReport {
        name: name.to_string(),
        inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        log2_value,
        value: (log2_value.abs() < 1000.0).then(|| log2_value.exp2()),
    }
}

/// The objective g(y) = (1 + y + … + y^{q-1}) / y^{(q-1)/3}.
pub fn g_objective(q: u64, y: f64) -> f64 {
    debug_assert!(y > 0.0 && y < 1.0);
    let mut s = 1.0f64;
    for _ in 1..q {
        s = s * y + 1.0;
    }
    s / y.powf((q - 1) as f64 / 3.0)
}

fn golden_section(q: u64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g_objective(q, x1);
    let mut f2 = g_objective(q, x2);
    while b - a > 1e-12 * 0.5 * (a + b) {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g_objective(q, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g_objective(q, x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimize g over (0,1): geometric-grid bracketing validated for
/// unimodality, then golden-section to 1e-12 relative width. Falls back
/// to a dense uniform grid if the bracket looks non-unimodal.
pub fn compute_constants(q: u64) -> Result<QConstants> {
    if q == 2 {
        return Err(Error::QTooSmall(q));
    }
    // validation includes the prime-power check
    fq::FieldSpace::make(q, 1)?;

    let (lo, hi) = (1e-6f64, 1.0 - 1e-6);
    let points = 256usize;
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    let ys: Vec<f64> = (0..points).map(|i| lo * ratio.powi(i as i32)).collect();
    let gs: Vec<f64> = ys.iter().map(|&y| g_objective(q, y)).collect();
    let argmin = gs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;

    // unimodal bracket: descending up to the argmin, ascending after
    let unimodal = argmin > 0
        && argmin + 1 < points
        && gs[..=argmin].windows(2).all(|w| w[1] <= w[0])
        && gs[argmin..].windows(2).all(|w| w[1] >= w[0]);

    let (y_star, g_star) = if unimodal {
        golden_section(q, ys[argmin - 1], ys[argmin + 1])
    } else {
        let n = 1_000_000usize;
        let step = (hi - lo) / (n - 1) as f64;
        let mut best = (lo, g_objective(q, lo));
        for i in 1..n {
            let y = lo + step * i as f64;
            let g = g_objective(q, y);
            if g < best.1 {
                best = (y, g);
            }
        }
        golden_section(q, (best.0 - step).max(lo), (best.0 + step).min(hi))
    };

    let c_q = 1.0 - g_star.ln() / (q as f64).ln();
    Ok(QConstants {
        q,
        y_star,
        g_star,
        c_q,
        big_c_q: 1.0 + 1.0 / c_q,
    })
}

impl QConstants {
    /// log-space value of the cap bound q^{n(1-c_q)}.
    pub fn eg_bound(&self, n: u32) -> BoundReport {
        let log2 = n as f64 * (1.0 - self.c_q) * (self.q as f64).log2();
        report("eg_bound", &[("q", self.q as f64), ("n", n as f64)], log2)
    }

    /// Exponent of the main theorem: any subset larger than |A|^this has a 3-AP.
    pub fn thm11_exponent(&self) -> f64 {
        1.0 - 1.0 / (2.0 * (self.big_c_q - 2.0))
    }

    /// p-floor exponent of the random-subset theorem as stated up front:
    /// p >= q^{n(-1/2 + t(C_q-1)/2)}.
    pub fn thm12_p_floor_exponent(&self, t: f64) -> f64 {
        -0.5 + t * (self.big_c_q - 1.0) / 2.0
    }

    /// p-floor exponent as restated for the proof, with the extra -beta/2.
    pub fn thm12_p_floor_exponent_strict(&self, t: f64, beta: f64) -> f64 {
        self.thm12_p_floor_exponent(t) - beta / 2.0
    }

    /// The delta produced by the low-energy argument for a given epsilon.
    pub fn thm65_delta(&self, eps: f64) -> f64 {
        eps / (2.0 * (self.big_c_q - 1.0))
    }

    /// Container-step parameters at density exponent `s`, plus the iteration
    /// count k for the target exponent `t`.
    pub fn container_params(&self, n: u32, s: f64, beta: f64, t: f64) -> Result<ContainerParams> {
        if beta <= 0.0 {
            return Err(Error::RangeError("beta must be positive".into()));
        }
        let s_max = self.c_q * (1.0 - 3.0 * beta);
        if !(0.0..=s_max).contains(&s) {
            return Err(Error::RangeError(format!(
                "s = {} outside [0, c_q(1-3beta)] = [0, {}]",
                s, s_max
            )));
        }
        let lq = (self.q as f64).log2();
        let nf = n as f64;
        Ok(ContainerParams {
            epsilon_log2: -beta * nf * lq,
            tau_log2: 0.5 * nf * (2.0 * beta - 1.0 + s * (self.big_c_q - 1.0)) * lq,
            count_exponent_log2: 0.5 * nf * (1.0 + s * (self.big_c_q - 3.0) + 2.0 * beta) * lq,
            iterations: (t * self.big_c_q / beta + 1.0).ceil() as u64,
        })
    }

    /// The probability chain bounding P(a random subset has a large 3-AP-free
    /// subset): both the raw three-factor product and the collapsed
    /// (2e/q^{2βn})^m envelope, in log2.
    pub fn probability_bound(
        &self,
        n: u32,
        t: f64,
        beta: f64,
        p: f64,
        container_c: f64,
    ) -> Result<ProbabilityBound> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::RangeError(format!("p = {} not in (0, 1]", p)));
        }
        if t > self.c_q * (1.0 - 3.0 * beta) || t < 0.0 || beta <= 0.0 {
            return Err(Error::RangeError(format!(
                "t = {} outside [0, c_q(1-3beta)]",
                t
            )));
        }
        let lq = (self.q as f64).log2();
        let nf = n as f64;
        // the proof restatement carries an extra -beta/2 in the floor; the
        // up-front statement omits it (see `thm12_p_floor_exponent`)
        let floor_log2 = nf * self.thm12_p_floor_exponent_strict(t, beta) * lq;
        if p.log2() < floor_log2 {
            return Err(Error::RangeError(format!(
                "p below the admissible floor 2^{:.3}",
                floor_log2
            )));
        }
        let m_log2 = p.log2() + nf * (1.0 - t + 2.0 * beta) * lq;
        let m = m_log2.exp2();
        let envelope_log2 = m * ((2.0 * std::f64::consts::E).log2() - 2.0 * beta * nf * lq);
        let container_log2 = container_c
            * nf
            * nf
            * (nf * (0.5 + t * (self.big_c_q - 3.0) / 2.0 + beta) * lq).exp2();
        let binom_log2 = m * (std::f64::consts::E.log2() + nf * (1.0 - t) * lq - m_log2);
        let product_log2 = container_log2 + binom_log2 + m * p.log2();
        if !envelope_log2.is_finite() || !product_log2.is_finite() {
            return Err(Error::RangeError(
                "bound exponent exceeds double precision".into(),
            ));
        }
        let inputs = [
            ("q", self.q as f64),
            ("n", nf),
            ("t", t),
            ("beta", beta),
            ("p", p),
            ("container_c", container_c),
            ("m_log2", m_log2),
        ];
        Ok(ProbabilityBound {
            envelope: report("probability_envelope", &inputs, envelope_log2),
            three_factor: report("probability_three_factor", &inputs, product_log2),
            m_log2,
            p_floor_note: P_FLOOR_NOTE,
        })
    }
}

/// The two theorem statements disagree on the p-floor; evaluators use the
/// proof-section form and flag it.
pub const P_FLOOR_NOTE: &str =
    "p-floor uses the proof restatement exponent -1/2 + t(C_q-1)/2 - beta/2; \
     the introduction states it without the -beta/2 term";

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContainerParams {
    pub epsilon_log2: f64,
    pub tau_log2: f64,
    /// log2 of the exponent E in |C| <= 2^{c n² E}.
    pub count_exponent_log2: f64,
    pub iterations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbabilityBound {
    pub envelope: BoundReport,
    pub three_factor: BoundReport,
    pub m_log2: f64,
    pub p_floor_note: &'static str,
}

/// Default for the unspecified container-theorem constant c(3) <= 1000·r·r!³.
pub const CONTAINER_C3_DEFAULT: f64 = 648_000.0; // 1000 * 3 * 216

/// Current best bounds on r_3(N): Behrend-type lower, log-power upper.
/// `c_upper` is the unspecified absolute constant of the upper bound.
pub fn r3_bounds(n: f64, c_upper: f64) -> Result<(BoundReport, BoundReport)> {
    if !(n >= 3.0) {
        return Err(Error::DomainError(format!("N = {} must be >= 3", n)));
    }
    if c_upper <= 0.0 {
        return Err(Error::DomainError("c must be positive".into()));
    }
    let ln_n = n.ln();
    let lower_log2 = n.log2() + 0.25 * ln_n.log2() - 2.0 * std::f64::consts::SQRT_2 * ln_n.sqrt();
    let upper_log2 = n.log2() - (1.0 + c_upper) * ln_n.log2();
    Ok((
        report("r3_lower", &[("N", n)], lower_log2),
        report("r3_upper", &[("N", n), ("c", c_upper)], upper_log2),
    ))
}

/// Invertible h-function families for the r_3 upper-bound shape.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum HSpec {
    /// h(x) = k · x^a
    Power { a: f64, k: f64 },
    /// h(x) = (ln x)^{1+c} / C
    LogPower { c: f64, big_c: f64 },
}

impl HSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            HSpec::Power { a, k } => k * x.powf(a),
            HSpec::LogPower { c, big_c } => x.ln().powf(1.0 + c) / big_c,
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            HSpec::Power { a, k } => (y / k).powf(1.0 / a),
            HSpec::LogPower { c, big_c } => ((big_c * y).powf(1.0 / (1.0 + c))).exp(),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            HSpec::Power { a, k } => format!("{}*x^{}", k, a),
            HSpec::LogPower { c, big_c } => format!("(ln x)^{}/{}", 1.0 + c, big_c),
        }
    }
}

/// Guaranteed 3-AP count (η / (2 (h⁻¹(4/η))⁴)) · N² for subsets of density η.
pub fn varnavides_count(n: u64, eta: f64, h: &HSpec) -> Result<BoundReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::DomainError(format!("eta = {} not in (0, 1]", eta)));
    }
    let m = h.inverse(4.0 / eta);
    if !(m.floor() >= 1.0 && m.floor() <= n as f64) {
        return Err(Error::PreconditionFailed(format!(
            "floor(h^-1(4/eta)) = {} not in [1, N = {}]",
            m.floor(),
            n
        )));
    }
    let log2 = eta.log2() - 1.0 - 4.0 * m.log2() + 2.0 * (n as f64).log2();
    Ok(report(
        "varnavides_count",
        &[("N", n as f64), ("eta", eta), ("h_inv", m)],
        log2,
    ))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HConditionRow {
    pub n: f64,
    /// h(N) <= N
    pub h_le_x: bool,
    /// h(N^{1/5}/1000) >= 4 h(N^γ)
    pub technical1: bool,
    /// N^{1/10} >= h(N^γ)^{3/2} · (h⁻¹(4 h(N^γ)))²
    pub technical2: bool,
}

impl HConditionRow {
    pub fn all(&self) -> bool {
        self.h_le_x && self.technical1 && self.technical2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HConditionReport {
    pub h: String,
    pub gamma: f64,
    pub rows: Vec<HConditionRow>,
    /// Smallest sweep point from which every later row passes all conditions.
    pub n0_all_pass: Option<f64>,
}

/// Sweep the h-function technical conditions over a geometric N grid.
/// Out-of-domain evaluations (NaN) fail their row; failures are data here,
/// not errors.
pub fn check_h_conditions(
    h: &HSpec,
    gamma: f64,
    n_range: (f64, f64),
    points: usize,
) -> HConditionReport {
    assert!(points >= 2 && n_range.0 >= 3.0 && n_range.1 > n_range.0);
    let ratio = (n_range.1 / n_range.0).powf(1.0 / (points - 1) as f64);
    let rows: Vec<HConditionRow> = (0..points)
        .map(|i| {
            let n = n_range.0 * ratio.powi(i as i32);
            let hn_gamma = h.eval(n.powf(gamma));
            HConditionRow {
                n,
                h_le_x: h.eval(n) <= n,
                technical1: h.eval(n.powf(0.2) / 1000.0) >= 4.0 * hn_gamma,
                technical2: n.powf(0.1) >= hn_gamma.powf(1.5) * h.inverse(4.0 * hn_gamma).powi(2),
            }
        })
        .collect();
    let mut n0 = None;
    for row in rows.iter().rev() {
        if row.all() {
            n0 = Some(row.n);
        } else {
            break;
        }
    }
    HConditionReport {
        h: h.describe(),
        gamma,
        rows,
        n0_all_pass: n0,
    }
}
