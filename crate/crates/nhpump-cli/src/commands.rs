//! One function per subcommand; each writes its CSVs and manifest and
//! returns the domain error (if any) that should decide the exit code.

use std::io::Write;

use rayon::prelude::*;
use serde_json::json;

use nhpump::eigen::{band_energy, Band};
use nhpump::gapscan::{merge_gapless_marks, min_gap, GapReport, RefineOpts};
use nhpump::model::{bloch_vector_at, Boundary, DriveParams, PhasePoint, TAU};
use nhpump::pump::{bod_cycle, PumpConfig};
use nhpump::realspace::{build_chain, exact_spectrum, spectral_distance};
use nhpump::topology::{chern_derivative, chern_plaquette, TorusGrid, GAP_TOL};
use nhpump::{gbz, Error};

use crate::report::{fmt, Reporter};
use crate::{ChernArgs, GapscanArgs, GbzArgs, OracleArgs, PumpArgs, SpectrumArgs};

type CmdResult = Result<(), CmdError>;

/// Either an I/O failure (bug territory) or a domain error (exit 3 / 2).
#[derive(Debug)]
pub enum CmdError {
    Io(std::io::Error),
    Domain(Error),
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Domain(e)
    }
}

fn params(mu: f64, gamma: f64) -> DriveParams {
    DriveParams::new(mu, gamma)
}

fn mu_grid(mu_min: f64, mu_max: f64, n_mu: usize) -> Vec<f64> {
    if n_mu == 1 {
        return vec![mu_min];
    }
    let step = (mu_max - mu_min) / (n_mu - 1) as f64;
    (0..n_mu).map(|i| mu_min + step * i as f64).collect()
}

pub fn spectrum(args: &SpectrumArgs) -> CmdResult {
    let boundary = args.boundary.into();
    let p = params(args.mu, args.gamma);
    if args.n < 2 {
        return Err(Error::InvalidArgument("--n must be >= 2".into()).into());
    }
    // probe once so a degenerate GBZ fails before any file is written
    bloch_vector_at(&p, &PhasePoint::new(0.0, args.t), boundary)?;

    let mut reporter = Reporter::new(args.out.clone(), "spectrum");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "momentum,re_e_plus,im_e_plus,re_e_minus,im_e_minus",
    )?;
    let mut min_abs = f64::INFINITY;
    for i in 0..args.n {
        let momentum = TAU * i as f64 / (args.n - 1) as f64;
        let d = bloch_vector_at(&p, &PhasePoint::new(momentum, args.t), boundary)?;
        let e = band_energy(&d, Band::Plus);
        min_abs = min_abs.min(e.norm());
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(momentum),
            fmt(e.re),
            fmt(e.im),
            fmt(-e.re),
            fmt(-e.im)
        )?;
    }
    w.flush()?;

    let radius = match boundary {
        Boundary::Obc => Some(gbz::gbz_radius(&p)?),
        Boundary::Pbc => None,
    };
    reporter.finish(
        "spectrum",
        serde_json::to_value(args).unwrap(),
        json!({ "n_momentum": args.n }),
        json!({}),
        json!({ "gbz_radius": radius, "min_abs_e_sampled": min_abs }),
    )?;
    Ok(())
}

pub fn gapscan(args: &GapscanArgs) -> CmdResult {
    let boundary = args.boundary.into();
    let grid = TorusGrid::square(args.grid, boundary)?;
    let refine = RefineOpts {
        rounds: args.refine_rounds,
        factor: args.refine_factor,
    };
    let mus = mu_grid(args.mu_min, args.mu_max, args.n_mu);

    let rows: Vec<(f64, Result<GapReport, Error>)> = mus
        .par_iter()
        .map(|&mu| (mu, min_gap(&params(mu, args.gamma), boundary, &grid, refine)))
        .collect();

    let mut reporter = Reporter::new(args.out.clone(), "gapscan");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "mu,min_abs_e,argmin_momentum,argmin_phase,ep_defect_at_argmin,gapless",
    )?;
    let mut marks = Vec::new();
    let mut excluded = Vec::new();
    for (mu, row) in &rows {
        match row {
            Ok(r) => {
                let gapless = r.min_abs_e < args.tol;
                marks.push((r.mu, gapless));
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    fmt(r.mu),
                    fmt(r.min_abs_e),
                    fmt(r.argmin.momentum),
                    fmt(r.argmin.drive_phase),
                    fmt(r.ep_defect_at_argmin),
                    gapless
                )?;
            }
            Err(Error::DegenerateGBZ { .. }) => excluded.push(*mu),
            Err(e) => return Err(e.clone().into()),
        }
    }
    w.flush()?;

    let intervals = merge_gapless_marks(&marks);
    let intervals_path = reporter.sibling("_intervals");
    let mut wi = reporter.open_csv(&intervals_path, "kind,mu_lo,mu_hi")?;
    for (lo, hi) in &intervals {
        writeln!(wi, "gapless,{},{}", fmt(*lo), fmt(*hi))?;
    }
    for mu in &excluded {
        writeln!(wi, "excluded,{},{}", fmt(*mu), fmt(*mu))?;
    }
    wi.flush()?;

    reporter.finish(
        "gapscan",
        serde_json::to_value(args).unwrap(),
        json!({ "torus_grid": args.grid, "n_mu": args.n_mu,
                "refine_rounds": args.refine_rounds, "refine_factor": args.refine_factor }),
        json!({ "gapless_tol": args.tol }),
        json!({ "gapless_intervals": intervals, "excluded_mu": excluded }),
    )?;
    Ok(())
}

pub fn chern(args: &ChernArgs) -> CmdResult {
    let boundary = args.boundary.into();
    let band: Band = args.band.into();
    let grid = TorusGrid::square(args.grid, boundary)?;
    let mus = mu_grid(args.mu_min, args.mu_max, args.n_mu);

    struct Row {
        mu: f64,
        plaquette: Result<f64, Error>,
        derivative: Result<f64, Error>,
        converged: bool,
    }
    let rows: Vec<Row> = mus
        .par_iter()
        .map(|&mu| {
            let p = params(mu, args.gamma);
            let plaq = chern_plaquette(&p, band, &grid);
            let deriv = chern_derivative(&p, band, &grid);
            let converged = plaq.as_ref().map(|r| r.converged).unwrap_or(false);
            Row {
                mu,
                plaquette: plaq.map(|r| r.value),
                derivative: deriv.map(|r| r.value),
                converged,
            }
        })
        .collect();

    let mut reporter = Reporter::new(args.out.clone(), "chern");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "mu,c_plaquette,c_derivative,converged,error",
    )?;
    let mut n_converged = 0usize;
    let mut first_error: Option<Error> = None;
    let mut any_ok = false;
    for row in &rows {
        let error_name = match (&row.plaquette, &row.derivative) {
            (Ok(_), Ok(_)) => {
                any_ok = true;
                String::new()
            }
            (Err(e), _) | (_, Err(e)) => {
                first_error.get_or_insert_with(|| e.clone());
                e.name().to_string()
            }
        };
        if row.converged {
            n_converged += 1;
        }
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt(row.mu),
            fmt(*row.plaquette.as_ref().unwrap_or(&f64::NAN)),
            fmt(*row.derivative.as_ref().unwrap_or(&f64::NAN)),
            row.converged,
            error_name
        )?;
    }
    w.flush()?;

    reporter.finish(
        "chern",
        serde_json::to_value(args).unwrap(),
        json!({ "torus_grid": args.grid, "n_mu": args.n_mu }),
        json!({ "gap_tol": GAP_TOL }),
        json!({ "converged_points": n_converged }),
    )?;
    if !any_ok {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    Ok(())
}

pub fn pump(args: &PumpArgs) -> CmdResult {
    let boundary = args.boundary.into();
    let band: Band = args.band.into();
    let cfg = PumpConfig::new(boundary, args.n_k, args.steps);

    let runs: Vec<(f64, Result<nhpump::PumpResult, Error>)> = args
        .mu
        .par_iter()
        .map(|&mu| {
            let p = params(mu, args.gamma).with_adiabatic_factor(args.adiabatic_factor);
            (mu, bod_cycle(&p, band, &cfg))
        })
        .collect();

    let mut reporter = Reporter::new(args.out.clone(), "pump");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "mu,re_bod,im_bod,chern,max_abs_im,im_range,im_total_variation,chern_converged,error",
    )?;
    let series_path = reporter.sibling("_imseries");
    let mut ws = reporter.open_csv(&series_path, "mu,time,max_im,min_im")?;

    let mut derived = Vec::new();
    let mut first_error: Option<Error> = None;
    let mut any_ok = false;
    for (mu, run) in &runs {
        match run {
            Ok(res) => {
                any_ok = true;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},",
                    fmt(*mu),
                    fmt(res.bod.re),
                    fmt(res.bod.im),
                    fmt(res.chern_reference.value),
                    fmt(res.im_stats.max_abs_im),
                    fmt(res.im_stats.im_range),
                    fmt(res.im_stats.im_total_variation),
                    res.chern_reference.converged
                )?;
                for s in &res.im_stats.im_series {
                    writeln!(
                        ws,
                        "{},{},{},{}",
                        fmt(*mu),
                        fmt(s.time),
                        fmt(s.max_im),
                        fmt(s.min_im)
                    )?;
                }
                derived.push(json!({
                    "mu": mu,
                    "re_bod": res.bod.re,
                    "chern": res.chern_reference.value,
                    "deviation": (res.bod.re - res.chern_reference.value).abs(),
                }));
            }
            Err(e) => {
                first_error.get_or_insert_with(|| e.clone());
                writeln!(w, "{},nan,nan,nan,nan,nan,nan,false,{}", fmt(*mu), e.name())?;
            }
        }
    }
    w.flush()?;
    ws.flush()?;

    reporter.finish(
        "pump",
        serde_json::to_value(args).unwrap(),
        json!({ "n_momentum": args.n_k, "n_steps": args.steps, "chern_grid": args.n_k }),
        json!({ "overlap_tol": nhpump::pump::OVERLAP_TOL, "gap_tol": GAP_TOL }),
        json!({ "runs": derived }),
    )?;
    if !any_ok {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    Ok(())
}

pub fn gbz_cmd(args: &GbzArgs) -> CmdResult {
    let p = params(args.mu, args.gamma);
    let contour = gbz::gbz_contour(&p, args.t, args.n_phi)?;

    let mut reporter = Reporter::new(args.out.clone(), "gbz");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "phi,re_beta,im_beta,abs_beta",
    )?;
    for s in &contour.samples {
        for beta in [s.beta.0, s.beta.1] {
            writeln!(
                w,
                "{},{},{},{}",
                fmt(s.phi),
                fmt(beta.re),
                fmt(beta.im),
                fmt(beta.norm())
            )?;
        }
    }
    w.flush()?;

    reporter.finish(
        "gbz",
        serde_json::to_value(args).unwrap(),
        json!({ "n_phi": args.n_phi }),
        json!({ "admissibility_tol": gbz::ADMISSIBILITY_TOL }),
        json!({
            "gbz_radius": contour.radius,
            "pole_order": contour.pole_order,
            "half_degree": contour.half_degree,
        }),
    )?;
    Ok(())
}

pub fn oracle(args: &OracleArgs) -> CmdResult {
    let p = params(args.mu, args.gamma);
    let mut spectra = Vec::new();
    for &n in &args.n_cells {
        if n == 0 {
            return Err(Error::InvalidArgument("--n-cells entries must be >= 1".into()).into());
        }
        let chain = exact_spectrum(&build_chain(&p, args.t, n))?;
        let gbz_spec = gbz::obc_spectrum_gbz(&p, args.t, args.theta_mult * n)?;
        let dist = spectral_distance(&chain, &gbz_spec);
        spectra.push((n, chain, gbz_spec, dist));
    }

    let mut reporter = Reporter::new(args.out.clone(), "oracle");
    let mut w = reporter.open_csv(
        &reporter.csv_path().to_path_buf(),
        "source,n_cells,re_e,im_e",
    )?;
    for (n, chain, gbz_spec, _) in &spectra {
        for e in chain {
            writeln!(w, "chain,{n},{},{}", fmt(e.re), fmt(e.im))?;
        }
        for e in gbz_spec {
            writeln!(w, "gbz,{n},{},{}", fmt(e.re), fmt(e.im))?;
        }
    }
    w.flush()?;

    let dist_path = reporter.sibling("_distances");
    let mut wd = reporter.open_csv(&dist_path, "n_cells,hausdorff_distance")?;
    for (n, _, _, dist) in &spectra {
        writeln!(wd, "{n},{}", fmt(*dist))?;
    }
    wd.flush()?;

    let radius = gbz::gbz_radius(&p)?;
    let distances: Vec<_> = spectra
        .iter()
        .map(|(n, _, _, d)| json!({ "n_cells": n, "distance": d }))
        .collect();
    reporter.finish(
        "oracle",
        serde_json::to_value(args).unwrap(),
        json!({ "n_cells": args.n_cells, "theta_mult": args.theta_mult }),
        json!({}),
        json!({ "gbz_radius": radius, "distances": distances }),
    )?;
    Ok(())
}
