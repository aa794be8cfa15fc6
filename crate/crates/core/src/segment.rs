//! Per-segment characteristic parameters and the four-function solution basis
//! of X'''' + (2 + Aη̄) X'' + (1 − A) X = 0.

/// Sign regime of μ² = −1 − (η̄/2)A + B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// μ² > 0: {cosh μφ, sinh μφ, cos νφ, sin νφ}.
    HyperTrig,
    /// μ² < 0: {cos μ̂φ, sin μ̂φ, cos νφ, sin νφ} with μ̂ = √(−μ²).
    BiTrig,
    /// μ² ≈ 0: {1, φ, cos νφ, sin νφ}.
    DegenerateZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentParams {
    pub a: f64,
    pub b: f64,
    pub mu_sq: f64,
    pub nu_sq: f64,
    pub eta_bar: f64,
    pub regime: Regime,
}

impl SegmentParams {
    /// μ for `HyperTrig`, μ̂ for `BiTrig`, 0 for `DegenerateZero`.
    pub fn mu(&self) -> f64 {
        match self.regime {
            Regime::DegenerateZero => 0.0,
            _ => self.mu_sq.abs().sqrt(),
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu_sq.sqrt()
    }

    /// Coefficient 1 + Aη̄ multiplying X in the moment expression.
    pub fn moment_factor(&self) -> f64 {
        1.0 + self.a * self.eta_bar
    }

    /// Residual of the segment ODE for a value/derivative column.
    pub fn ode_residual(&self, d: [f64; 5]) -> (f64, f64) {
        let t0 = (1.0 - self.a) * d[0];
        let t2 = (2.0 + self.a * self.eta_bar) * d[2];
        let r = d[4] + t2 + t0;
        (r, d[4].abs().max(t2.abs()).max(t0.abs()))
    }
}

/// Relative width of the degenerate band around μ² = 0.
pub const DEGENERATE_TOL: f64 = 1e-10;

pub fn frequency_params(omega: f64, thickness_ratio: f64, eta_bar: f64) -> SegmentParams {
    let a = omega * omega / (thickness_ratio * thickness_ratio);
    let b = 0.5 * (a * a * eta_bar * eta_bar + 4.0 * a * (1.0 + eta_bar)).sqrt();
    let half = 0.5 * eta_bar * a;
    let mu_sq = -1.0 - half + b;
    let nu_sq = 1.0 + half + b;
    let regime = if mu_sq.abs() <= DEGENERATE_TOL * a.max(1.0) {
        Regime::DegenerateZero
    } else if mu_sq > 0.0 {
        Regime::HyperTrig
    } else {
        Regime::BiTrig
    };
    SegmentParams {
        a,
        b,
        mu_sq,
        nu_sq,
        eta_bar,
        regime,
    }
}

/// Basis values and derivatives at one angle: `values[order][function]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEval {
    pub phi: f64,
    pub values: [[f64; 4]; 4],
}

/// Evaluates the closed-form basis (unscaled, as in the general solution)
/// at local angle `phi`.
pub fn basis_eval(params: &SegmentParams, phi: f64) -> BasisEval {
    let mut values = [[0.0; 4]; 4];
    let mu = params.mu();
    match params.regime {
        Regime::HyperTrig => {
            let (c, s) = ((mu * phi).cosh(), (mu * phi).sinh());
            let d = [c, mu * s, mu * mu * c, mu * mu * mu * s];
            let e = [s, mu * c, mu * mu * s, mu * mu * mu * c];
            for k in 0..4 {
                values[k][0] = d[k];
                values[k][1] = e[k];
            }
        }
        Regime::BiTrig => {
            let (c, s) = ((mu * phi).cos(), (mu * phi).sin());
            let d = [c, -mu * s, -mu * mu * c, mu * mu * mu * s];
            let e = [s, mu * c, -mu * mu * s, -mu * mu * mu * c];
            for k in 0..4 {
                values[k][0] = d[k];
                values[k][1] = e[k];
            }
        }
        Regime::DegenerateZero => {
            values[0][0] = 1.0;
            values[0][1] = phi;
            values[1][1] = 1.0;
        }
    }
    let nu = params.nu();
    let (c, s) = ((nu * phi).cos(), (nu * phi).sin());
    let d = [c, -nu * s, -nu * nu * c, nu * nu * nu * s];
    let e = [s, nu * c, -nu * nu * s, -nu * nu * nu * c];
    for k in 0..4 {
        values[k][2] = d[k];
        values[k][3] = e[k];
    }
    BasisEval { phi, values }
}

/// One conditioning-friendly pair of basis functions.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Pair {
    /// {c, s} with c'' = m c, s'' = m s, c(0) = 1, c'(0) = 0, s(0) = 0,
    /// s'(0) = 1; entire in m, so the basis is continuous across regimes.
    Analytic { m: f64 },
    /// {e^{−μφ}, e^{μ(φ−L)}}, bounded by 1 on [0, L].
    Exponential { mu: f64, length: f64 },
}

/// Switch to exponentials when μL exceeds this.
const EXP_SWITCH: f64 = 1.0;

impl Pair {
    fn new(m: f64, length: f64) -> Self {
        if m > 0.0 && m.sqrt() * length > EXP_SWITCH {
            Pair::Exponential {
                mu: m.sqrt(),
                length,
            }
        } else {
            Pair::Analytic { m }
        }
    }

    /// Values and derivatives up to order 3 of both functions.
    fn eval(&self, phi: f64) -> [[f64; 2]; 4] {
        match *self {
            Pair::Analytic { m } => {
                let (c, s) = if m > 0.0 {
                    let mu = m.sqrt();
                    ((mu * phi).cosh(), (mu * phi).sinh() / mu)
                } else if m < 0.0 {
                    let mu = (-m).sqrt();
                    ((mu * phi).cos(), (mu * phi).sin() / mu)
                } else {
                    (1.0, phi)
                };
                [[c, s], [m * s, c], [m * c, m * s], [m * m * s, m * c]]
            }
            Pair::Exponential { mu, length } => {
                let p = (-mu * phi).exp();
                let q = (mu * (phi - length)).exp();
                [
                    [p, q],
                    [-mu * p, mu * q],
                    [mu * mu * p, mu * mu * q],
                    [-mu * mu * mu * p, mu * mu * mu * q],
                ]
            }
        }
    }

    /// ln of the factor relating this pair's determinant contribution to
    /// the analytic pair's: D_analytic = D_here · exp(correction).
    fn log_correction(&self) -> f64 {
        match self {
            Pair::Analytic { .. } => 0.0,
            Pair::Exponential { mu, length } => mu * length - (2.0 * mu).ln(),
        }
    }

    /// Coefficients with respect to the unscaled closed-form pair.
    fn to_closed_form(self, regime_zero: bool, x: f64, y: f64) -> (f64, f64) {
        match self {
            Pair::Analytic { m } => {
                if regime_zero || m == 0.0 {
                    (x, y)
                } else {
                    (x, y / m.abs().sqrt())
                }
            }
            Pair::Exponential { mu, length } => {
                let decay = (-mu * length).exp();
                (x + y * decay, -x + y * decay)
            }
        }
    }
}

/// Basis used for assembly: local angle, conditioning-friendly scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableBasis {
    pub params: SegmentParams,
    pairs: [Pair; 2],
}

impl StableBasis {
    pub fn new(params: SegmentParams, length: f64) -> Self {
        let m1 = match params.regime {
            Regime::DegenerateZero => 0.0,
            _ => params.mu_sq,
        };
        StableBasis {
            params,
            pairs: [Pair::new(m1, length), Pair::Analytic { m: -params.nu_sq }],
        }
    }

    /// `values[order][function]` at local angle `phi`.
    pub fn eval(&self, phi: f64) -> [[f64; 4]; 4] {
        let a = self.pairs[0].eval(phi);
        let b = self.pairs[1].eval(phi);
        let mut out = [[0.0; 4]; 4];
        for k in 0..4 {
            out[k] = [a[k][0], a[k][1], b[k][0], b[k][1]];
        }
        out
    }

    pub fn log_correction(&self) -> f64 {
        self.pairs[0].log_correction() + self.pairs[1].log_correction()
    }

    /// Converts stable-basis coefficients to closed-form basis coefficients.
    pub fn to_closed_form(self, c: [f64; 4]) -> [f64; 4] {
        let zero = self.params.regime == Regime::DegenerateZero;
        let (c1, c2) = self.pairs[0].to_closed_form(zero, c[0], c[1]);
        let (c3, c4) = self.pairs[1].to_closed_form(false, c[2], c[3]);
        [c1, c2, c3, c4]
    }
}
