use num_complex::Complex64 as C;

use crate::core_model::{apply_term, project_onto, Commutation, InterpolationSpec, PauliTerm};
use crate::error::{Error, Result};
use crate::spectral_ed::prepare_by_projection;

const WEIGHT_TOL: f64 = 1e-20;

fn split(terms: &[PauliTerm], i: usize, phi: Vec<C>, flips: usize, out: &mut Vec<usize>) {
    if i == terms.len() {
        out.push(flips);
        return;
    }
    for (sigma, flipped) in [(-1.0, 0usize), (1.0, 1usize)] {
        let mut part = phi.clone();
        project_onto(&terms[i], sigma, &mut part);
        let w: f64 = part.iter().map(|x| x.norm_sqr()).sum();
        if w > WEIGHT_TOL {
            split(terms, i + 1, part, flips + flipped, out);
        }
    }
}

/// Largest number of flipped h_init terms among excited sectors reached by V
/// from the ground space of h_init (the s = 0 eigenbasis). `None` is the identity.
pub fn first_order_support(spec: &InterpolationSpec, v: Option<&PauliTerm>) -> Result<usize> {
    if spec.n > 12 {
        return Err(Error::TooLarge(format!("{} qubits > 12", spec.n)));
    }
    let terms = &spec.h_init;
    for (i, a) in terms.iter().enumerate() {
        if terms[i + 1..].iter().any(|b| a.commutation(b) != Commutation::Commute) {
            return Err(Error::Ambiguous("h_init terms do not commute; sectors are not exact".into()));
        }
    }
    let Some(v) = v else { return Ok(0) };
    if v.factors.len() > 2 {
        return Err(Error::Domain("perturbation must act on one or two qubits".into()));
    }
    let psi = prepare_by_projection(spec.n, terms, &[], &[], 7)?;
    let phi = apply_term(v, &psi);
    let mut sectors = Vec::new();
    split(terms, 0, phi, 0, &mut sectors);
    Ok(sectors.into_iter().filter(|&f| f > 0).max().unwrap_or(0))
}
