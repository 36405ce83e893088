use thiserror::Error;

use crate::solver::{LinExpr, Model, ModelError, Sense, Var};

#[derive(Debug, Error, PartialEq)]
pub enum LinearizeError {
    #[error("big-M must be finite and non-negative, got {0}")]
    BadBigM(f64),
    #[error("exclusive-pair linearization needs u+ + u- <= 1 in the model")]
    MissingExclusivity,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check_m(m: f64) -> Result<(), LinearizeError> {
    if !m.is_finite() || m < 0.0 {
        return Err(LinearizeError::BadBigM(m));
    }
    Ok(())
}

/// ω = u·π for binary u and 0 ≤ π ≤ M.
pub fn linearize_product(model: &mut Model, u: Var, pi: Var, big_m: f64, name: &str) -> Result<Var, LinearizeError> {
    check_m(big_m)?;
    let w = model.continuous(format!("w[{name}]"), 0.0, f64::INFINITY)?;
    model.add_constraint(format!("w_u[{name}]"), LinExpr::from(w) - LinExpr::term(u, big_m), Sense::Le, 0.0)?;
    model.add_constraint(format!("w_pi[{name}]"), LinExpr::from(w) - pi, Sense::Le, 0.0)?;
    // ω ≥ π − M(1 − u)
    model.add_constraint(format!("w_lo[{name}]"), LinExpr::from(w) - pi - LinExpr::term(u, big_m), Sense::Ge, -big_m)?;
    Ok(w)
}

/// (ω+, ω−) = (u+·π, u−·π) with one merged lower-bound row, valid when u+ + u− ≤ 1.
pub fn linearize_exclusive_pair(
    model: &mut Model,
    up: Var,
    down: Var,
    pi: Var,
    big_m: f64,
    exclusive: bool,
    name: &str,
) -> Result<(Var, Var), LinearizeError> {
    check_m(big_m)?;
    if !exclusive {
        return Err(LinearizeError::MissingExclusivity);
    }
    let wp = model.continuous(format!("wp[{name}]"), 0.0, f64::INFINITY)?;
    let wm = model.continuous(format!("wm[{name}]"), 0.0, f64::INFINITY)?;
    for (w, u, tag) in [(wp, up, "p"), (wm, down, "m")] {
        model.add_constraint(format!("w{tag}_u[{name}]"), LinExpr::from(w) - LinExpr::term(u, big_m), Sense::Le, 0.0)?;
        model.add_constraint(format!("w{tag}_pi[{name}]"), LinExpr::from(w) - pi, Sense::Le, 0.0)?;
    }
    // ω+ + ω− ≥ π − M(1 − u+ − u−)
    let lhs = LinExpr::from(wp) + wm - pi - LinExpr::term(up, big_m) - LinExpr::term(down, big_m);
    model.add_constraint(format!("w_pair[{name}]"), lhs, Sense::Ge, -big_m)?;
    Ok((wp, wm))
}
