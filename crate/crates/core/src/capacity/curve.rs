//! Capacity and bound curves over a budget grid.

use std::collections::HashMap;
use std::io::Write;

use super::{check_budget, min_info_over_states, region_bound_with, OuterOptions, OuterSearch};
use crate::dist::{Avc, Dist};
use crate::error::{Error, Result};
use crate::symmetry::{CostKind, CostOracle, LpCosts, MemoCosts, DEFAULT_MMAX};

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityCurvePoint {
    pub lambda: f64,
    pub c_r: f64,
    pub achievable: f64,
    pub converse: f64,
    pub p_r: Dist,
    pub p_ach: Option<Dist>,
    pub p_conv: Option<Dist>,
    pub achievable_empty: bool,
    pub converse_empty: bool,
    pub tie: bool,
}

impl CapacityCurvePoint {
    /// `;`-separated flag tokens for CSV output.
    pub fn flags(&self) -> String {
        let mut f = Vec::new();
        if self.achievable_empty {
            f.push("empty-region");
        }
        if self.converse_empty {
            f.push("converse-empty-region");
        }
        if self.tie {
            f.push("tie");
        }
        f.join(";")
    }
}

/// Curve with LP symmetrizing costs, memoized across the budget grid.
pub fn capacity_curve(
    avc: &Avc,
    list_size: usize,
    lambda_grid: &[f64],
    grid: usize,
) -> Result<Vec<CapacityCurvePoint>> {
    let oracle = MemoCosts::new(LpCosts::new(avc));
    capacity_curve_with(
        avc,
        &oracle,
        list_size,
        lambda_grid,
        OuterOptions {
            grid,
            m_max: DEFAULT_MMAX,
        },
    )
}

pub fn capacity_curve_with(
    avc: &Avc,
    oracle: &dyn CostOracle,
    list_size: usize,
    lambda_grid: &[f64],
    opts: OuterOptions,
) -> Result<Vec<CapacityCurvePoint>> {
    if lambda_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "budget grid must be sorted ascending".into(),
        ));
    }
    lambda_grid
        .iter()
        .map(|&lambda| curve_point(avc, oracle, list_size, lambda, opts))
        .collect()
}

fn curve_point(
    avc: &Avc,
    oracle: &dyn CostOracle,
    list_size: usize,
    lambda: f64,
    opts: OuterOptions,
) -> Result<CapacityCurvePoint> {
    check_budget(avc, lambda)?;
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut info = |p: &Dist| -> Result<f64> {
        let key: Vec<u64> = p.as_slice().iter().map(|v| v.to_bits()).collect();
        if let Some(&v) = cache.get(&key) {
            return Ok(v);
        }
        let v = min_info_over_states(avc, p, lambda)?.value;
        cache.insert(key, v);
        Ok(v)
    };
    let mut all = |_: &Dist, _: bool| Ok(true);
    let (c_r, p_r) = OuterSearch {
        nx: avc.nx(),
        grid: opts.grid,
        concave: true,
        qualify: &mut all,
        objective: &mut info,
    }
    .run()?
    .expect("unrestricted region is nonempty");
    let ach = region_bound_with(
        avc,
        oracle,
        CostKind::Weak,
        lambda,
        list_size,
        opts,
        &mut info,
    )?;
    let conv = region_bound_with(
        avc,
        oracle,
        CostKind::Strong,
        lambda,
        list_size,
        opts,
        &mut info,
    )?;
    Ok(CapacityCurvePoint {
        lambda,
        c_r,
        achievable: ach.value,
        converse: conv.value,
        p_r,
        p_ach: ach.p,
        p_conv: conv.p,
        achievable_empty: ach.empty_region,
        converse_empty: conv.empty_region,
        tie: ach.tie || conv.tie,
    })
}

/// Formats a number with 6 significant digits.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn format_input(p: &Option<Dist>) -> String {
    match p {
        None => String::new(),
        Some(p) if p.len() == 2 => format_sig(p[1]),
        Some(p) => p
            .as_slice()
            .iter()
            .map(|&v| format_sig(v))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

pub const CURVE_HEADER: &str = "lambda,c_r,achievable,converse,p_r,p_ach,p_conv,flag";

/// Writes the curve as CSV. Input distributions are given as `P(1)` for
/// binary inputs and as `;`-separated vectors otherwise.
pub fn write_curve_csv(points: &[CapacityCurvePoint], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for pt in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig(pt.lambda),
            format_sig(pt.c_r),
            format_sig(pt.achievable),
            format_sig(pt.converse),
            format_input(&Some(pt.p_r.clone())),
            format_input(&pt.p_ach),
            format_input(&pt.p_conv),
            pt.flags()
        )?;
    }
    Ok(())
}
