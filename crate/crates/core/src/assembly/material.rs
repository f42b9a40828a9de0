use crate::error::FieldError;

/// Fluid and structure material constants. The Lamé parameters are always
/// derived from `e` and `nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho_f: f64,
    pub mu_f: f64,
    pub rho_s: f64,
    pub e: f64,
    pub nu: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            rho_f: 1000.0,
            mu_f: 1.0,
            rho_s: 1280.0,
            e: 2.5e6,
            nu: 0.384,
        }
    }
}

impl MaterialParams {
    pub fn lambda_s(&self) -> f64 {
        self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))
    }

    pub fn mu_s(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// `max{1, μ_f, ρ_f/Δt, ρ_s/Δt, Δt μ_s, Δt λ_s}`.
    pub fn scaling(&self, dt: f64) -> f64 {
        [1.0, self.mu_f, self.rho_f / dt, self.rho_s / dt, dt * self.mu_s(), dt * self.lambda_s()]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn validate(&self, prefix: &str) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                errs.push(FieldError {
                    field: format!("{prefix}.{name}"),
                    message: format!("must be positive and finite, got {v}"),
                });
            }
        };
        positive("rho_f", self.rho_f);
        positive("mu_f", self.mu_f);
        positive("rho_s", self.rho_s);
        positive("e", self.e);
        if !(self.nu > 0.0 && self.nu < 0.5) {
            errs.push(FieldError {
                field: format!("{prefix}.nu"),
                message: format!("ν must satisfy 0 < ν < 0.5, got {}", self.nu),
            });
        }
        errs
    }
}
