//! Monic cubics, binary cubic forms, maximality and monogeniser counting.

mod form;
mod monic;

pub use form::{forms_equivalent, reduce_form, BinaryCubicForm, Gl2};
pub use monic::{
    dedekind_is_maximal_at, family_discriminant, is_maximal, quadratic_genus_two_rank,
    translate, unit_constant_translates, MonicCubic,
};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Upper bound on how often one field occurs among the unit monogenisers.
pub const MONOGENISER_BOUND: usize = 60;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    /// Translation classes of monogenisers found in the window.
    pub count: usize,
    /// Polynomials `x^3 + a x^2 + b x + 1` in the window, before grouping.
    pub occurrences: usize,
    /// Those polynomials, sorted.
    pub members: Vec<MonicCubic>,
    /// One representative per class, the smallest `(a, b)` among its unit
    /// translates.
    pub witnesses: Vec<MonicCubic>,
}

/// The smallest `(a, b)` among the translates of `x^3 + a x^2 + b x + 1`
/// that keep constant coefficient 1.
fn translation_class_rep(f: &MonicCubic) -> MonicCubic {
    unit_constant_translates(f)
        .iter()
        .map(|n| translate(f, n))
        .min()
        .unwrap_or_else(|| f.clone())
}

/// Counts maximal `x^3 + a x^2 + b x + 1` with `max(|a|, |b|) <= bound`
/// defining the same field as `f`, up to translation.
///
/// Errors with [`Error::AuditFailure`] if more than
/// [`MONOGENISER_BOUND`] classes turn up.
pub fn monogeniser_multiplicity(f: &MonicCubic, search_bound: u64) -> Result<MultiplicityReport> {
    if !is_maximal(f)? {
        return Err(Error::domain(format!("{f} is not maximal")));
    }
    let disc = f.discriminant();
    let target = reduce_form(&BinaryCubicForm::from_monic(f))?;
    let bound = search_bound as i64;
    let mut members = Vec::new();
    let mut classes: Vec<MonicCubic> = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            // roots -1 and 1 respectively
            if a == b || a + b == -2 {
                continue;
            }
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            if family_discriminant(&a, &b) != disc {
                continue;
            }
            let g = MonicCubic::unit(a, b);
            if !is_maximal(&g)? || reduce_form(&BinaryCubicForm::from_monic(&g))? != target {
                continue;
            }
            let rep = translation_class_rep(&g);
            if !classes.contains(&rep) {
                classes.push(rep);
            }
            members.push(g);
        }
    }
    classes.sort();
    if classes.len() > MONOGENISER_BOUND {
        return Err(Error::AuditFailure(format!(
            "{f} has {} unit monogeniser classes within bound {search_bound}",
            classes.len()
        )));
    }
    Ok(MultiplicityReport {
        count: classes.len(),
        occurrences: members.len(),
        members,
        witnesses: classes,
    })
}
