//! Variable towers with two commuting endomorphisms.
//!
//! A tower declares an ordered list of variables, the last one being the
//! equation variable. Each variable carries a phi- and a sigma-action, each of
//! which is the identity, a shift by a constant from a lower level, or a
//! scaling by a nonzero constant from a lower level. Commutation of the two
//! substitution families is checked at construction.

use num_rational::BigRational;


use crate::error::{EngineError, Result};
use crate::poly::RPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endo {
    Phi,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Identity,
    /// v maps to v + c, with c a polynomial in strictly lower variables.
    Shift(RPoly),
    /// v maps to c * v, with c nonzero in strictly lower variables.
    Scale(RPoly),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSpec {
    pub name: String,
    pub phi: Action,
    pub sigma: Action,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    vars: Vec<VarSpec>,
    phi_images: Vec<RPoly>,
    sigma_images: Vec<RPoly>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn normalize_action(action: Action) -> Action {
    match action {
        Action::Shift(c) if c.is_zero() => Action::Identity,
        Action::Scale(c) if c.is_one() => Action::Identity,
        other => other,
    }
}

impl TowerSpec {
    pub fn new(vars: Vec<VarSpec>) -> Result<Self> {
        if vars.is_empty() {
            return Err(EngineError::InvalidTower(
                "a tower needs at least the equation variable".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, v) in vars.iter().enumerate() {
            if !valid_name(&v.name) {
                return Err(EngineError::InvalidTower(format!(
                    "invalid variable name `{}`",
                    v.name
                )));
            }
            if !seen.insert(v.name.clone()) {
                return Err(EngineError::InvalidTower(format!(
                    "duplicate variable `{}`",
                    v.name
                )));
            }
            for action in [&v.phi, &v.sigma] {
                match action {
                    Action::Identity => {}
                    Action::Shift(c) => {
                        if c.level().map_or(false, |l| l >= i) {
                            return Err(EngineError::InvalidTower(format!(
                                "shift constant of `{}` must use lower variables only",
                                v.name
                            )));
                        }
                    }
                    Action::Scale(c) => {
                        if c.is_zero() {
                            return Err(EngineError::InvalidTower(format!(
                                "scale constant of `{}` is zero",
                                v.name
                            )));
                        }
                        if c.level().map_or(false, |l| l >= i) {
                            return Err(EngineError::InvalidTower(format!(
                                "scale constant of `{}` must use lower variables only",
                                v.name
                            )));
                        }
                    }
                }
            }
        }
        let vars: Vec<VarSpec> = vars
            .into_iter()
            .map(|v| VarSpec {
                name: v.name,
                phi: normalize_action(v.phi),
                sigma: normalize_action(v.sigma),
            })
            .collect();
        let phi_images = Self::images_of(&vars, Endo::Phi);
        let sigma_images = Self::images_of(&vars, Endo::Sigma);
        for (i, v) in vars.iter().enumerate() {
            let ps = sigma_images[i].subst_all(&phi_images);
            let sp = phi_images[i].subst_all(&sigma_images);
            if ps != sp {
                return Err(EngineError::NonCommutingActions(v.name.clone()));
            }
        }
        Ok(TowerSpec {
            vars,
            phi_images,
            sigma_images,
        })
    }

    fn images_of(vars: &[VarSpec], endo: Endo) -> Vec<RPoly> {
        vars.iter()
            .enumerate()
            .map(|(i, v)| {
                let action = match endo {
                    Endo::Phi => &v.phi,
                    Endo::Sigma => &v.sigma,
                };
                match action {
                    Action::Identity => RPoly::var(i),
                    Action::Shift(c) => RPoly::var(i).add(c),
                    Action::Scale(c) => RPoly::var(i).mul(c),
                }
            })
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn top_level(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn var(&self, level: usize) -> &VarSpec {
        &self.vars[level]
    }

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn name(&self, level: usize) -> &str {
        &self.vars[level].name
    }

    pub fn level_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn action(&self, endo: Endo, level: usize) -> &Action {
        match endo {
            Endo::Phi => &self.vars[level].phi,
            Endo::Sigma => &self.vars[level].sigma,
        }
    }

    pub fn images(&self, endo: Endo) -> &[RPoly] {
        match endo {
            Endo::Phi => &self.phi_images,
            Endo::Sigma => &self.sigma_images,
        }
    }

    /// Whether the endomorphism acts as the identity on the whole tower.
    pub fn is_identity(&self, endo: Endo) -> bool {
        (0..self.nvars()).all(|i| *self.action(endo, i) == Action::Identity)
    }

    /// Image of an exact evaluation point under an endomorphism; the action
    /// constants are evaluated at the original point (simultaneous semantics).
    pub fn endo_point(&self, point: &[BigRational], endo: Endo) -> Vec<BigRational> {
        (0..self.nvars())
            .map(|i| match self.action(endo, i) {
                Action::Identity => point[i].clone(),
                Action::Shift(c) => &point[i] + c.eval_rat(point),
                Action::Scale(c) => &point[i] * c.eval_rat(point),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    pub fn shift_tower() -> TowerSpec {
        // Q(t)(z), phi: z -> z+1, sigma: z -> z+t
        TowerSpec::new(vec![
            VarSpec {
                name: "t".into(),
                phi: Action::Identity,
                sigma: Action::Identity,
            },
            VarSpec {
                name: "z".into(),
                phi: Action::Shift(RPoly::one()),
                sigma: Action::Shift(RPoly::var(0)),
            },
        ])
        .unwrap()
    }

    #[test]
    fn commuting_actions_accepted() {
        shift_tower();
    }

    #[test]
    fn non_commuting_rejected() {
        // phi: z -> z+t, sigma: t -> t+1 do not commute as substitutions:
        // phi(sigma(z)) = z+t vs sigma(phi(z)) = z+t+1
        let err = TowerSpec::new(vec![
            VarSpec {
                name: "t".into(),
                phi: Action::Identity,
                sigma: Action::Shift(RPoly::one()),
            },
            VarSpec {
                name: "z".into(),
                phi: Action::Shift(RPoly::var(0)),
                sigma: Action::Identity,
            },
        ])
        .unwrap_err();
        assert_eq!(err, EngineError::NonCommutingActions("z".into()));
    }

    #[test]
    fn point_endo_matches_substitution() {
        let tower = shift_tower();
        let point = vec![rat(1, 3), rat(2, 1)];
        let moved = tower.endo_point(&point, Endo::Sigma);
        assert_eq!(moved, vec![rat(1, 3), rat(7, 3)]);
    }
}
