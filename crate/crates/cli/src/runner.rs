//! Command implementations: each builds the requested pipeline from a
//! [`RunConfig`], runs the certifications, and returns a [`Report`].

use crate::config::{poly_from_json, poly_to_json, ConfigError, PolyJson, RunConfig};
use crate::dump::{write_disc_dump, DumpError};
use crate::report::{write_atomic, Report};
use jdisc::bishop::{BishopError, BishopSolver};
use jdisc::disc_ops::{
    boundary_symmetrization_residual, cauchy_green_transform, green_schwarz_reconstruct,
    green_schwarz_reconstruct_at, mean_p0, CauchyGreenPlan, DiscFunction, DiscOpsError,
    SchwarzCoeffs,
};
use jdisc::family::{
    covering_check, sweep_family, AdmissionTolerances, FamilyError, InvertOptions, SweepGrid,
};
use jdisc::geometry::{
    complex_matrix_from_structure_matrix, dilate_structure, flatten_edge, normalize_structure,
    structure_from_complex_matrix, z_jet_residual, FlattenOptions, GeometryError,
    RealStructureField, STRUCTURE_AXIOM_TOL,
};
use jdisc::grid::DiscGrid;
use jdisc::poly::C64;
use jdisc::psh::{
    boundary_uniqueness_bound, levi_form, levi_form_via_disc, psh_certificate,
    subharmonic_composition_check, BallSampler, PshError, PshVerdict, ScalarField,
};
use serde_json::json;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Bishop(#[from] BishopError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Psh(#[from] PshError),
    #[error(transparent)]
    DiscOps(#[from] DiscOpsError),
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error("config section {0:?} is required for this command")]
    MissingSection(&'static str),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for configuration problems, 3 for solver/numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::MissingSection(_) | RunError::UnknownCommand(_) => 2,
            _ => 3,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Deterministic low-discrepancy-ish chart samples in a ball.
fn chart_samples(dim_n: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<C64>> {
    use jdisc::psh::RegionSampler;
    BallSampler::new(dim_n, radius, count, seed).points()
}

pub fn run_verify_structure(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("verify-structure", cfg.seed);
    let a = cfg.structure.to_field()?;
    let n = a.dim_n();
    let radius = a.domain_radius().min(1.0) * 0.8;
    let samples = chart_samples(n, radius, 40, cfg.seed);
    let mut max_norm: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    let mut max_round_trip: f64 = 0.0;
    for p in &samples {
        max_norm = max_norm.max(a.norm_at(p));
        let ap = a.eval(p);
        let j = structure_from_complex_matrix(&ap)?;
        let n2 = 2 * n;
        let defect = (&j * &j + nalgebra_identity(n2)).norm();
        max_defect = max_defect.max(defect);
        let back = complex_matrix_from_structure_matrix(&j, STRUCTURE_AXIOM_TOL)?;
        max_round_trip = max_round_trip.max((back - ap).norm());
    }
    report.check_le("operator_norm_below_one", max_norm, 1.0 - 1e-9);
    report.check_le("structure_axiom_defect", max_defect, STRUCTURE_AXIOM_TOL);
    report.check_le("a_j_round_trip", max_round_trip, 1e-10);
    if a.is_normalized() {
        report.check_le(
            "centered_at_origin",
            a.eval(&vec![c(0.0, 0.0); n]).norm(),
            1e-12,
        );
    }
    report.data = json!({
        "dim": n,
        "domain_radius": a.domain_radius(),
        "samples": samples.len(),
        "max_operator_norm": max_norm,
    });
    Ok(report)
}

fn nalgebra_identity(n: usize) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::identity(n, n)
}

pub fn run_normalize(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("normalize", cfg.seed);
    let a = cfg.structure.to_field()?;
    let (phi, a_new) = normalize_structure(&a, 4)?;
    let at0 = a_new
        .eval(&vec![c(0.0, 0.0); a.dim_n()])
        .norm();
    report.check_le("transformed_field_centered", at0, 1e-12);
    report.check_le("z_jet_residual", z_jet_residual(&a_new, 1e-5), 1e-8);
    report.check_true(
        "diffeo_linear_part_identity",
        phi.linear_part_is_identity(1e-12),
    );
    let phi_json: Vec<PolyJson> = phi.components().iter().map(poly_to_json).collect();
    let entries_json: Vec<Vec<PolyJson>> = (0..a.dim_n())
        .map(|i| {
            (0..a.dim_n())
                .map(|j| poly_to_json(a_new.entries().get(i, j)))
                .collect()
        })
        .collect();
    report.data = json!({
        "diffeo": phi_json,
        "transformed_entries": entries_json,
    });
    Ok(report)
}

pub fn run_flatten(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("flatten", cfg.seed);
    let a = cfg.structure.to_field()?;
    let wedge_cfg = cfg.wedge.as_ref().ok_or(RunError::MissingSection("wedge"))?;
    let wedge = wedge_cfg.to_wedge(a.dim_n())?;
    let out = flatten_edge(&wedge, &a, &FlattenOptions::default())?;
    report.check_le("edge_flatness", out.edge_flatness, 1e-8);
    for (j, margin) in out.psh_margins.iter().enumerate() {
        report.check_ge(&format!("x{}_levi_margin", j + 1), *margin, -1e-9);
    }
    let entries_json: Vec<Vec<PolyJson>> = (0..a.dim_n())
        .map(|i| {
            (0..a.dim_n())
                .map(|j| poly_to_json(out.structure.entries().get(i, j)))
                .collect()
        })
        .collect();
    report.data = json!({
        "diffeo": out.diffeo.components().iter().map(poly_to_json).collect::<Vec<_>>(),
        "flattened_entries": entries_json,
        "flattened_rho": out.wedge.rho().iter().map(poly_to_json).collect::<Vec<_>>(),
        "psh_margins": out.psh_margins,
    });
    Ok(report)
}

pub fn run_solve_disc(cfg: &RunConfig, out_dir: &Path) -> Result<Report, RunError> {
    let mut report = Report::new("solve-disc", cfg.seed);
    let a = cfg.structure.to_field()?;
    let grid = DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let solver = BishopSolver::new(grid, a);
    let params = cfg.disc_params()?;
    let disc = solver.solve(&params, &cfg.solve_options())?;
    report.check_le(
        "fixed_point_residual",
        disc.residuals.fixed_point,
        cfg.solver.tol,
    );
    report.check_le("cauchy_riemann_residual", disc.residuals.cauchy_riemann, 1e-6);
    report.check_le("attachment_residual", disc.residuals.attachment, 1e-8);
    report.check_le("containment", disc.residuals.containment, 1e-10);
    report.check_le("holomorphy_defect", disc.residuals.holomorphy_defect, 1e-8);
    if let Some(q) = disc.contraction_ratio {
        report.check_le("contraction_ratio", q, 1.0 - 1e-9);
    }
    let dump_path = out_dir.join("disc.csv");
    write_atomic(&dump_path, &write_disc_dump(&disc))?;
    let center = disc.center();
    report.data = json!({
        "iterations": disc.iterations,
        "contraction_ratio": disc.contraction_ratio,
        "center": center.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "dump": dump_path.to_string_lossy(),
    });
    Ok(report)
}

pub fn run_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<Report, RunError> {
    let mut report = Report::new("sweep", cfg.seed);
    let a = cfg.structure.to_field()?;
    let sweep_cfg = cfg.sweep.as_ref().ok_or(RunError::MissingSection("sweep"))?;
    let grid = DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let solver = BishopSolver::new(grid, a);
    let sweep_grid = SweepGrid {
        c_range: (sweep_cfg.c_range[0], sweep_cfg.c_range[1]),
        t_range: (sweep_cfg.t_range[0], sweep_cfg.t_range[1]),
        c_count: sweep_cfg.c_count,
        t_count: sweep_cfg.t_count,
    };
    let sweep = sweep_family(
        &solver,
        &sweep_grid,
        cfg.solver.lambda,
        &cfg.solve_options(),
        &AdmissionTolerances::default(),
    );
    report.check_true("no_failures", sweep.failures.is_empty());
    let mut worst_cr: f64 = 0.0;
    let mut discs_json = Vec::new();
    for (i, disc) in sweep.discs.iter().enumerate() {
        worst_cr = worst_cr.max(disc.residuals.cauchy_riemann);
        if sweep_cfg.dump_discs {
            let path = out_dir.join(format!("disc_{i:03}.csv"));
            write_atomic(&path, &write_disc_dump(disc))?;
        }
        let center = disc.center();
        discs_json.push(json!({
            "c": disc.params.c,
            "t": disc.params.t,
            "center": center.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "fixed_point": disc.residuals.fixed_point,
            "cauchy_riemann": disc.residuals.cauchy_riemann,
            "attachment": disc.residuals.attachment,
            "containment": disc.residuals.containment,
            "iterations": disc.iterations,
        }));
    }
    report.check_le("worst_cauchy_riemann", worst_cr, 1e-6);
    report.data = json!({
        "lambda": sweep.lambda,
        "disc_count": sweep.discs.len(),
        "failures": sweep.failures.iter().map(|(p, e)| json!({
            "c": p.c, "t": p.t, "error": e,
        })).collect::<Vec<_>>(),
        "discs": discs_json,
    });
    Ok(report)
}

pub fn run_cover(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("cover", cfg.seed);
    let a = cfg.structure.to_field()?;
    let delta = cfg.wedge.as_ref().map(|w| w.delta).unwrap_or(0.3);
    let grid = DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let solver = BishopSolver::new(grid, a);
    let opts = InvertOptions {
        tol: 1e-9,
        solve: cfg.solve_options(),
        ..Default::default()
    };
    let cover = covering_check(
        &solver,
        delta,
        cfg.cover.sample_count,
        cfg.solver.lambda,
        cfg.cover.scale,
        cfg.seed,
        &opts,
    );
    report.check_le("miss_count", cover.miss_count() as f64, 0.0);
    report.check_le("max_inversion_residual", cover.max_residual(), 1e-8);
    report.check_le("max_newton_steps", cover.max_newton_steps() as f64, 8.0);
    let all_t_positive = cover
        .hits
        .iter()
        .all(|h| h.params.t.iter().all(|&t| t > 0.0));
    report.check_true("all_t_positive", all_t_positive);
    report.data = json!({
        "delta": cover.delta,
        "lambda": cover.lambda,
        "scale": cover.scale,
        "seed": cover.seed,
        "hit_count": cover.hits.len(),
        "misses": cover.misses.iter().map(|(p, e)| json!({
            "target": p.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "error": e,
        })).collect::<Vec<_>>(),
        "hits": cover.hits.iter().map(|h| json!({
            "target": h.target.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "c": h.params.c,
            "t": h.params.t,
            "residual": h.residual,
            "newton_steps": h.newton_steps,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

pub fn run_hessian(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("hessian", cfg.seed);
    let a = cfg.structure.to_field()?;
    let psh_cfg = cfg.psh.as_ref().ok_or(RunError::MissingSection("psh"))?;
    let n = a.dim_n();
    let u = ScalarField::new(n, poly_from_json(&psh_cfg.u, n)?)?;
    let a_scaled = dilate_structure(&a, psh_cfg.lambda);
    let j = RealStructureField::derived(a_scaled.clone());
    let sampler = BallSampler::new(n, psh_cfg.radius, psh_cfg.samples, cfg.seed);
    let cert = psh_certificate(&u, &sampler, &j)?;
    let verdict = cert.verdict();
    report.check_ge("min_levi_eigenvalue", cert.min_eigenvalue(), -cert.tol);
    if psh_cfg.cross_check {
        let grid = DiscGrid::new(cfg.grid.n_r.min(24), cfg.grid.n_theta.min(64));
        let plan = CauchyGreenPlan::new(grid.clone());
        let p = vec![c(0.01, -0.005); n];
        let mut v = vec![0.0; 2 * n];
        v[0] = 1.0;
        let form = levi_form(&u, &p, &v, &j)?;
        let disc1 = levi_form_via_disc(&u, &p, &v, &a_scaled, 0.01, grid.clone(), &plan)?;
        let disc2 = levi_form_via_disc(&u, &p, &v, &a_scaled, 0.005, grid, &plan)?;
        let e1 = (disc1 - form).abs();
        let e2 = (disc2 - form).abs();
        report.check_le("levi_definitions_agree", e1, 1e-3);
        report.check_le("levi_agreement_refined", e2, e1.max(1e-6));
    }
    report.data = json!({
        "verdict": match verdict {
            PshVerdict::StrictlyPsh => "strictly psh",
            PshVerdict::Psh => "psh",
            PshVerdict::NotPsh => "not psh",
        },
        "min_eigenvalue": cert.min_eigenvalue(),
        "samples": cert.samples.iter().map(|(p, e)| json!({
            "point": p.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "min_eigenvalue": e,
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

pub fn run_uniqueness_demo(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("uniqueness-demo", cfg.seed);
    let a = cfg.structure.to_field()?;
    let n = a.dim_n();
    let grid = DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let solver = BishopSolver::new(grid.clone(), a);
    let params = cfg.disc_params()?;
    let disc = solver.solve(&params, &cfg.solve_options())?;
    let (u, m_levels) = match cfg.psh.as_ref() {
        Some(p) => (
            ScalarField::new(n, poly_from_json(&p.u, n)?)?,
            p.m_levels.clone(),
        ),
        None => (ScalarField::sum_re_squared(n), vec![10.0, 100.0, 1000.0]),
    };
    let sub = subharmonic_composition_check(&u, &disc.z)?;
    report.check_le(
        "sub_mean_value_violations",
        sub.mean_value_violations as f64,
        0.0,
    );
    report.check_le(
        "laplacian_violations",
        sub.laplacian_violations as f64,
        0.0,
    );
    // compose u with the disc boundary and drive the truncation bound
    let v_boundary: Vec<f64> = {
        let traces: Vec<&[C64]> = disc.z.iter().map(|comp| comp.boundary_trace()).collect();
        (0..grid.n_theta())
            .map(|k| {
                let point: Vec<C64> = traces.iter().map(|t| t[k]).collect();
                u.eval(&point)
            })
            .collect()
    };
    let bounds: Vec<(f64, f64)> = m_levels
        .iter()
        .map(|&m| (m, boundary_uniqueness_bound(&v_boundary, grid.boundary(), m)))
        .collect();
    if bounds.len() >= 2 {
        let (m1, b1) = bounds[0];
        let (m2, b2) = bounds[1];
        let slope = (b2 - b1) / (m2 - m1);
        report.check_le("bound_slope_error", (slope + 0.5).abs(), 0.0);
        let decreasing = bounds.windows(2).all(|w| w[1].1 < w[0].1);
        report.check_true("bound_decreasing_in_m", decreasing);
    }
    report.data = json!({
        "sub_mean_value": {
            "violations": sub.mean_value_violations,
            "worst_defect": sub.worst_mean_defect,
            "tolerance": sub.tolerance,
        },
        "laplacian": {
            "violations": sub.laplacian_violations,
            "min": sub.min_laplacian,
        },
        "upper_arc_harmonic_measure": jdisc::psh::UPPER_ARC_HARMONIC_MEASURE,
        "bounds": bounds.iter().map(|(m, b)| json!({"m": m, "bound": b})).collect::<Vec<_>>(),
    });
    Ok(report)
}

pub fn run_operators_selftest(cfg: &RunConfig) -> Result<Report, RunError> {
    let mut report = Report::new("operators-selftest", cfg.seed);
    let grid = DiscGrid::new(cfg.grid.n_r, cfg.grid.n_theta);
    let plan = CauchyGreenPlan::new(grid.clone());

    // S = 2K − P₀ on seeded random trigonometric polynomials
    {
        let mut state = cfg.seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let deg = grid.n_theta() / 4;
            let coeffs: Vec<(f64, f64)> = (0..=deg).map(|_| (next(), next())).collect();
            let phi: Vec<C64> = (0..grid.n_theta())
                .map(|k| {
                    let t = grid.theta(k);
                    let mut v = 0.0;
                    for (m, (a, b)) in coeffs.iter().enumerate() {
                        v += a * (m as f64 * t).cos() + b * (m as f64 * t).sin();
                    }
                    c(v, 0.0)
                })
                .collect();
            let s = SchwarzCoeffs::new(&grid, &phi)?;
            let p0 = mean_p0(&phi);
            for &z in &[c(0.5, 0.2), c(-0.3, -0.8), c(0.99, 0.0), c(0.0, 0.0)] {
                let rhs = jdisc::disc_ops::cauchy_transform(&grid, &phi, z) * 2.0 - p0;
                worst = worst.max((s.eval(z) - rhs).norm());
            }
        }
        report.check_le("schwarz_identity", worst, 1e-12);
    }

    // closed forms of the pointwise Cauchy-Green path
    {
        let one = DiscFunction::from_fn(grid.clone(), |_| c(1.0, 0.0));
        let mut worst_in: f64 = 0.0;
        for &z in &[c(0.3, 0.4), c(-0.6, 0.1), c(0.0, 0.0)] {
            worst_in = worst_in.max((cauchy_green_transform(&one, z) - z.conj()).norm());
        }
        report.check_le("t_one_interior", worst_in, 1e-6);
        let mut worst_out: f64 = 0.0;
        for &z in &[c(1.4, 0.2), c(-0.8, 1.1)] {
            worst_out = worst_out.max((cauchy_green_transform(&one, z) - z.inv()).norm());
        }
        report.check_le("t_one_exterior", worst_out, 1e-6);
        let fb = DiscFunction::from_fn(grid.clone(), |z| z.conj());
        let mut worst_conj: f64 = 0.0;
        for &z in &[c(0.25, 0.4), c(-0.5, 0.1)] {
            worst_conj =
                worst_conj.max((cauchy_green_transform(&fb, z) - z.conj() * z.conj() * 0.5).norm());
        }
        report.check_le("t_conj_interior", worst_conj, 1e-5);
    }

    // finite-difference ∂̄(Tf) = f with measured radial convergence order
    {
        let (errors, order) = dbar_convergence(cfg.seed);
        report.check_ge("dbar_convergence_order", order, 2.0);
        report.data = json!({ "dbar_errors": errors });
    }

    // Green-Schwarz reconstruction and boundary symmetrization
    {
        let f = DiscFunction::from_fn(grid.clone(), |z| z.powu(3));
        let rec = green_schwarz_reconstruct(&f, &plan)?;
        report.check_le(
            "green_schwarz_holomorphic",
            rec.sub(&f).sup_norm(),
            1e-8,
        );
        let g = DiscFunction::from_fn(grid.clone(), |z| z.conj() * z * c(0.3, 0.7) + z * z);
        let t = plan.apply(&g);
        report.check_le(
            "boundary_symmetrization",
            boundary_symmetrization_residual(&t),
            1e-10,
        );
        let smooth = DiscFunction::from_fn(grid.clone(), |z| (z * 0.7).exp() * z.conj());
        let ts = plan.apply(&smooth);
        let (_, dzb) = ts.interior.wirtinger();
        report.check_le("dbar_identity_grid", dzb.sub(&smooth).sup_norm(), 1e-8);
    }

    // pointwise reconstruction errors under joint refinement
    {
        let probes = [c(0.3, 0.2), c(-0.45, 0.1), c(0.1, -0.5)];
        let mut errors = Vec::new();
        for &(n_r, n_t) in &[(12usize, 32usize), (24, 64), (48, 128)] {
            let g = DiscGrid::new(n_r, n_t);
            let f = DiscFunction::from_fn(g.clone(), |z| (z.conj() * c(0.9, 0.3)).exp());
            let mut err: f64 = 0.0;
            for &z in &probes {
                let rec = green_schwarz_reconstruct_at(&f, z)?;
                err = err.max((rec - (z.conj() * c(0.9, 0.3)).exp()).norm());
            }
            errors.push(err);
        }
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        report.check_true("green_schwarz_refinement_monotone", monotone);
        if let serde_json::Value::Object(map) = &mut report.data {
            map.insert("green_schwarz_refinement_errors".into(), json!(errors));
        }
    }

    Ok(report)
}

/// Max fd-`∂̄(Tf) − f` error over probes for a seeded degree-4 polynomial,
/// at `n_r ∈ {12, 24, 48}`, and the aggregate convergence order.
pub fn dbar_convergence(seed: u64) -> (Vec<f64>, f64) {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut coeffs = Vec::new();
    for a in 0..=2u32 {
        for b in 0..=2u32 {
            coeffs.push(((a, b), c(next(), next())));
        }
    }
    let poly = move |z: C64| -> C64 {
        coeffs
            .iter()
            .map(|&((a, b), w)| w * z.powu(a) * z.conj().powu(b))
            .sum()
    };
    let probes = [
        c(0.25, 0.15),
        c(-0.3, 0.35),
        c(0.05, -0.45),
        c(0.4, 0.3),
        c(-0.15, -0.2),
    ];
    let h = 2e-2;
    let mut errors = Vec::new();
    for &n_r in &[12usize, 24, 48] {
        let g = DiscGrid::new(n_r, 128);
        let f = DiscFunction::from_fn(g.clone(), &poly);
        let tf = |z: C64| cauchy_green_transform(&f, z);
        let mut err: f64 = 0.0;
        for &z in &probes {
            let dx = (-tf(z + c(2.0 * h, 0.0)) + tf(z + c(h, 0.0)) * 8.0
                - tf(z - c(h, 0.0)) * 8.0
                + tf(z - c(2.0 * h, 0.0)))
                / (12.0 * h);
            let dy = (-tf(z + c(0.0, 2.0 * h)) + tf(z + c(0.0, h)) * 8.0
                - tf(z - c(0.0, h)) * 8.0
                + tf(z - c(0.0, 2.0 * h)))
                / (12.0 * h);
            let dbar = (dx + c(0.0, 1.0) * dy) * 0.5;
            err = err.max((dbar - poly(z)).norm());
        }
        errors.push(err);
    }
    let order = (errors[0] / errors[2]).log2() / 2.0;
    (errors, order)
}

/// Dispatch a command by name.
pub fn run_command(name: &str, cfg: &RunConfig, out_dir: &Path) -> Result<Report, RunError> {
    match name {
        "verify-structure" => run_verify_structure(cfg),
        "normalize" => run_normalize(cfg),
        "flatten" => run_flatten(cfg),
        "solve-disc" => run_solve_disc(cfg, out_dir),
        "sweep" => run_sweep(cfg, out_dir),
        "cover" => run_cover(cfg),
        "hessian" => run_hessian(cfg),
        "uniqueness-demo" => run_uniqueness_demo(cfg),
        "operators-selftest" => run_operators_selftest(cfg),
        other => Err(RunError::UnknownCommand(other.into())),
    }
}
