//! Python bindings exposing the main wave-construction and stability
//! operations. Complex values cross the boundary as (re, im) tuples.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use svstab::error::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Froude thresholds (F_char, F_exist, F_1d, F_2d) for nu > 1.
#[pyfunction]
fn thresholds(nu: f64) -> PyResult<(f64, f64, f64, f64)> {
    let t = svstab::model::thresholds(nu).map_err(err)?;
    Ok((t.f_char, t.f_exist, t.f_1d, t.f_2d))
}

/// Minimum height of the homoclinic roll wave at Froude number f.
#[pyfunction]
fn hom_height(froude: f64) -> PyResult<f64> {
    svstab::model::hom_height(froude).map_err(err)
}

/// Classification of the hydraulic shock at (F, nu):
/// "Smooth" | "DecreasingDiscontinuous" | "Nonmonotone" | "Riemann".
#[pyfunction]
fn classify_shock(froude: f64, nu: f64) -> PyResult<String> {
    Ok(format!(
        "{:?}",
        svstab::profiles::classify_shock(froude, nu).map_err(err)?
    ))
}

/// Shock profile dictionary: kind, s, q, h_star, sonic, samples [(x, H)].
#[pyfunction]
fn shock_profile(py: Python<'_>, froude: f64, nu: f64, resolution: usize) -> PyResult<PyObject> {
    let p = svstab::profiles::shock_profile(froude, nu, resolution).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("kind", format!("{:?}", p.kind))?;
    d.set_item("s", p.s)?;
    d.set_item("q", p.q)?;
    d.set_item("h_star", p.h_star)?;
    d.set_item("sonic", p.hs_singular)?;
    d.set_item("samples", p.samples.clone())?;
    Ok(d.into())
}

/// Roll wave dictionary: h_plus, period, c, sonic_x, samples [(x, H)].
#[pyfunction]
fn roll_wave(py: Python<'_>, froude: f64, h_minus: f64, resolution: usize) -> PyResult<PyObject> {
    let w = svstab::profiles::roll_wave(froude, h_minus, resolution).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("h_plus", w.h_plus)?;
    d.set_item("period", w.period)?;
    d.set_item("c", w.c)?;
    d.set_item("sonic_x", w.sonic_x)?;
    d.set_item("samples", w.samples.clone())?;
    Ok(d.into())
}

/// The three dispersion roots at an endstate ("minus" or "plus"), sorted by
/// descending real part, as (re, im) pairs.
#[pyfunction]
fn dispersion_roots(
    froude: f64,
    nu: f64,
    side: &str,
    k: f64,
    eta: f64,
    mu: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let params = svstab::model::ShockParams::new(froude, nu).map_err(err)?;
    let side = match side {
        "minus" => svstab::essential::Side::MinusInfinity,
        "plus" => svstab::essential::Side::PlusInfinity,
        other => return Err(PyValueError::new_err(format!("side must be minus/plus, got {other}"))),
    };
    let roots = svstab::essential::dispersion_roots(&params, side, k, eta, mu);
    Ok(roots.iter().map(|r| (r.re, r.im)).collect())
}

/// Stabilizing weight window: None (not needed), (lo, hi), or raises when
/// empty ("none works").
#[pyfunction]
fn weight_window(froude: f64, nu: f64) -> PyResult<Option<(f64, f64)>> {
    match svstab::essential::weight_window(froude, nu).map_err(err)? {
        svstab::essential::WeightWindow::NotNeeded => Ok(None),
        svstab::essential::WeightWindow::Window { lo, hi } => Ok(Some((lo, hi))),
        svstab::essential::WeightWindow::Empty => Ok(Some((f64::NAN, f64::NAN))),
    }
}

/// Rescaled Evans-Lopatinsky determinant of a discontinuous shock at
/// (lambda, eta).
#[pyfunction]
fn shock_el(froude: f64, nu: f64, lambda: (f64, f64), eta: f64) -> PyResult<(f64, f64)> {
    let ev = svstab::evans::hydro::HydroEvans::from_params(froude, nu).map_err(err)?;
    let v = ev
        .value(C64::new(lambda.0, lambda.1), eta)
        .map_err(err)?;
    Ok((v.re, v.im))
}

/// Winding number of the shock determinant over the default contour at one
/// transverse frequency.
#[pyfunction]
fn shock_winding(froude: f64, nu: f64, eta: f64, r_outer: f64) -> PyResult<i64> {
    let spec = svstab::evans::hydro::ShockContourSpec {
        r_outer,
        n_outer: 400,
        n_seg: 120,
        n_inner: 100,
        n_center: 80,
        ..Default::default()
    };
    let report = svstab::evans::hydro::scan_shock(froude, nu, &[eta], &spec).map_err(err)?;
    if report.essential_unstable {
        return Err(PyValueError::new_err("F >= F_2d: essential instability"));
    }
    Ok(report.scans[0].winding)
}

/// Periodic Evans-Lopatinsky determinant of a roll wave at (lambda, eta, xi).
#[pyfunction]
fn roll_el(
    froude: f64,
    h_minus: f64,
    lambda: (f64, f64),
    eta: f64,
    xi: f64,
) -> PyResult<(f64, f64)> {
    let ev = svstab::evans::roll::RollEvans::from_params(froude, h_minus).map_err(err)?;
    let v = ev.el(C64::new(lambda.0, lambda.1), eta, xi).map_err(err)?;
    Ok((v.re, v.im))
}

/// lambda_r(F) of a roll wave (real part of the interior essential curve).
#[pyfunction]
fn lambda_r(froude: f64, h_minus: f64) -> PyResult<f64> {
    let w = svstab::profiles::roll_wave(froude, h_minus, 64).map_err(err)?;
    Ok(svstab::evans::roll::lambda_r(&w))
}

/// Low-frequency indices ind_1..ind_5 and the verdict string.
#[pyfunction]
fn lowfreq_indices(
    py: Python<'_>,
    froude: f64,
    h_minus: f64,
    nodes: usize,
) -> PyResult<PyObject> {
    let ev = svstab::evans::roll::RollEvans::from_params(froude, h_minus).map_err(err)?;
    let opts = svstab::lowfreq::TaylorOptions {
        nodes,
        convergence_check: false,
        ..Default::default()
    };
    let bundle = svstab::lowfreq::taylor_coeffs(&ev, &opts).map_err(err)?;
    let w = svstab::lowfreq::weierstrass_coeffs(&bundle).map_err(err)?;
    let idx = svstab::lowfreq::lf_indices(&w, 1e-7).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("ind1", idx.ind1)?;
    d.set_item("ind2", idx.ind2)?;
    d.set_item("ind3", idx.ind3)?;
    d.set_item("ind4", idx.ind4)?;
    d.set_item("ind5", idx.ind5)?;
    d.set_item("verdict", format!("{:?}", idx.verdict))?;
    d.set_item("structural_residual", bundle.structural_residual)?;
    Ok(d.into())
}

/// Turning-point frequency ranges of a shock profile as a list of
/// (family, lo, hi).
#[pyfunction]
fn turning_ranges(froude: f64, nu: f64) -> PyResult<Vec<(String, f64, f64)>> {
    let p = svstab::profiles::shock_profile(froude, nu, 64).map_err(err)?;
    Ok(svstab::highfreq::shock_turning_ranges(&p)
        .into_iter()
        .map(|r| (format!("{:?}", r.family), r.lo, r.hi))
        .collect())
}

/// High-frequency index ind(tau1) of a decreasing discontinuous profile.
#[pyfunction]
fn hf_index(froude: f64, nu: f64, tau: f64) -> PyResult<f64> {
    let p = svstab::profiles::shock_profile(froude, nu, 64).map_err(err)?;
    svstab::highfreq::hf_index(&p, tau).map_err(err)
}

/// Oblique shooting outcome: dict with exists, period, rh_residual.
#[pyfunction]
fn oblique_shoot(py: Python<'_>, froude: f64, theta: f64, vs: f64) -> PyResult<PyObject> {
    let d = PyDict::new_bound(py);
    match svstab::oblique::oblique_shoot(froude, theta, vs, 1e-6).map_err(err)? {
        svstab::oblique::ShootOutcome::Wave(w) => {
            d.set_item("exists", true)?;
            d.set_item("period", w.period)?;
            d.set_item("rh_residual", w.rh_residual)?;
        }
        svstab::oblique::ShootOutcome::NoWave { best_residual } => {
            d.set_item("exists", false)?;
            d.set_item("best_residual", best_residual)?;
        }
    }
    Ok(d.into())
}

/// The converted Brock table as a list of dicts.
#[pyfunction]
fn brock_converted(py: Python<'_>) -> PyResult<Vec<PyObject>> {
    let mut out = Vec::new();
    for rec in svstab::brock::brock_table() {
        let r = svstab::brock::rescale(&rec);
        let d = PyDict::new_bound(py);
        d.set_item("case", r.case)?;
        d.set_item("channel_width", r.channel_width)?;
        d.set_item("froude", r.froude)?;
        d.set_item("h_min", r.h_min)?;
        d.set_item("h_max", r.h_max)?;
        d.set_item("wavelength", r.wavelength)?;
        d.set_item("speed", r.speed)?;
        out.push(d.into());
    }
    Ok(out)
}

/// H_-/H_s fitted by the given way (1..6) for a Brock case id.
#[pyfunction]
fn brock_fit(froude_case: usize, way: usize) -> PyResult<f64> {
    let table = svstab::brock::brock_table();
    let rec = table
        .iter()
        .find(|r| r.case == froude_case)
        .ok_or_else(|| PyValueError::new_err(format!("no case {froude_case}")))?;
    let r = svstab::brock::rescale(rec);
    let fit = svstab::brock::fit_way(&r, way).map_err(err)?;
    Ok(fit.h_minus_over_hs)
}

#[pymodule]
fn svstab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(hom_height, m)?)?;
    m.add_function(wrap_pyfunction!(classify_shock, m)?)?;
    m.add_function(wrap_pyfunction!(shock_profile, m)?)?;
    m.add_function(wrap_pyfunction!(roll_wave, m)?)?;
    m.add_function(wrap_pyfunction!(dispersion_roots, m)?)?;
    m.add_function(wrap_pyfunction!(weight_window, m)?)?;
    m.add_function(wrap_pyfunction!(shock_el, m)?)?;
    m.add_function(wrap_pyfunction!(shock_winding, m)?)?;
    m.add_function(wrap_pyfunction!(roll_el, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_r, m)?)?;
    m.add_function(wrap_pyfunction!(lowfreq_indices, m)?)?;
    m.add_function(wrap_pyfunction!(turning_ranges, m)?)?;
    m.add_function(wrap_pyfunction!(hf_index, m)?)?;
    m.add_function(wrap_pyfunction!(oblique_shoot, m)?)?;
    m.add_function(wrap_pyfunction!(brock_converted, m)?)?;
    m.add_function(wrap_pyfunction!(brock_fit, m)?)?;
    Ok(())
}
