//! The resize kernel: moves a population slot to another format.

use rand::Rng;

use super::{BestRegistry, SearchConfig};
use crate::meta_ops::SIZE_PERMS;
use crate::scheme::Scheme;

/// What the resize kernel did to a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResizeReport {
    pub swapped: bool,
    pub merged: bool,
    pub action: Option<ResizeAction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResizeAction {
    Project,
    Product,
    Double,
    Extend,
}

/// Applies one resize step to `scheme` in place.
///
/// Operators that fail (capacity, mismatched formats, too small) leave the
/// scheme untouched.
pub fn resize<R: Rng + ?Sized>(
    scheme: &mut Scheme,
    registry: &BestRegistry,
    cfg: &SearchConfig,
    rng: &mut R,
) -> ResizeReport {
    let mut report = ResizeReport::default();
    if rng.random::<f64>() < 0.5 {
        // any of the five non-identity permutations
        let perm = SIZE_PERMS[rng.random_range(1..SIZE_PERMS.len())];
        if let Ok(s) = scheme.swap_sizes(perm) {
            *scheme = s;
            report.swapped = true;
        }
    }

    let pool = registry.schemes();
    if !pool.is_empty() {
        let other = pool[rng.random_range(0..pool.len())];
        if let Ok(s) = scheme.merge(other) {
            *scheme = s;
            report.merged = true;
        }
    }

    if !report.merged && rng.random::<f64>() < cfg.p_resize {
        let p = rng.random::<f64>();
        let (action, result) = if p < 0.05 {
            (ResizeAction::Project, scheme.project())
        } else if p < 0.55 {
            if pool.is_empty() {
                return report;
            }
            let other = pool[rng.random_range(0..pool.len())];
            (ResizeAction::Product, scheme.product(other))
        } else if p < 0.85 {
            (ResizeAction::Double, scheme.double())
        } else {
            (ResizeAction::Extend, scheme.extend())
        };
        if let Ok(s) = result {
            *scheme = s;
            report.action = Some(action);
        }
    }
    report
}
