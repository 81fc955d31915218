use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::{coherent_pulse, squeezed_moments, SqueezedVacuumSpec};
use crate::lineshape::LineshapeKind;
use crate::oracles::{direct_spectrum, gaussian_autoconvolution, relative_sup};
use crate::shaper::{sinusoidal_mask, split_delay_mask};
use crate::spectral::{gaussian_envelope, make_grid, sampled_fwhm};

const WP: f64 = 3.5407;

fn random_field(grid: SpectralGrid, seed: u64) -> CoherentField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = (0..grid.n_modes())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CoherentField::new(grid, amp).unwrap()
}

fn antisymmetric_mask(grid: &SpectralGrid, seed: u64) -> PhaseMask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phases = vec![0.0; grid.n_modes()];
    for k in 0..grid.n_pairs() {
        let p: f64 = rng.random_range(-20.0..20.0);
        phases[grid.upper_mode(k)] = p;
        phases[grid.lower_mode(k)] = -p;
    }
    PhaseMask::tabulated(grid, phases).unwrap()
}

#[test]
fn transform_limited_gaussian() {
    let g = make_grid(WP, 0.4, 4096).unwrap();
    let f = 0.099_83;
    let env = gaussian_envelope(&g, g.degenerate_freq(), f, 1.0).unwrap();
    let field = coherent_pulse(&env, &PhaseMask::zero(&g)).unwrap();
    let s = sfg_coherent(&field, &PhaseMask::zero(&g)).unwrap();
    let peak = s.at_pump().total;
    let exact = gaussian_autoconvolution(1.0, f, g.degenerate_freq(), WP);
    assert!((peak / exact - 1.0).abs() < 1e-9, "{peak} vs {exact}");
    let width = sampled_fwhm(&s.omegas(), &s.intensity).unwrap();
    assert!((width / (std::f64::consts::SQRT_2 * f) - 1.0).abs() < 1e-3);
    let argmax = (0..s.len())
        .max_by(|&a, &b| s.intensity[a].total_cmp(&s.intensity[b]))
        .unwrap();
    assert_eq!(argmax, g.center_output_index());
}

#[test]
fn zero_field_gives_zero_spectrum() {
    let g = make_grid(WP, 0.1, 64).unwrap();
    let field = CoherentField::new(g, vec![Complex64::new(0.0, 0.0); 64]).unwrap();
    let s = sfg_coherent(&field, &antisymmetric_mask(&g, 1)).unwrap();
    assert!(s.intensity.iter().all(|v| *v == 0.0));
    assert_eq!(s.len(), 127);
}

#[test]
fn antisymmetric_mask_keeps_pump_bin() {
    let g = make_grid(WP, 0.1, 512).unwrap();
    let field = random_field(g, 7);
    let base = sfg_coherent(&field, &PhaseMask::zero(&g))
        .unwrap()
        .at_pump()
        .total;
    for seed in 0..5 {
        let s = sfg_coherent(&field, &antisymmetric_mask(&g, seed)).unwrap();
        assert!((s.at_pump().total / base - 1.0).abs() < 1e-9);
    }
    let anti = sinusoidal_mask(&g, WP, 2.0, 500.0, 0.0).unwrap();
    let s = sfg_coherent(&field, &anti).unwrap();
    assert!((s.at_pump().total / base - 1.0).abs() < 1e-9);
}

#[test]
fn amplitude_sum_rule() {
    // Σ_j C_j = δω·(Σ_i E_i)²
    let g = make_grid(WP, 0.1, 256).unwrap();
    let field = random_field(g, 3);
    let mask = sinusoidal_mask(&g, WP, 0.7, 120.0, 0.9).unwrap();
    let c = coherent_amplitude(&field, &mask).unwrap();
    let shaped = mask.apply(&g, field.amplitude()).unwrap();
    let s: Complex64 = shaped.iter().sum();
    let lhs: Complex64 = c.iter().sum();
    assert!((lhs - s * s * g.spacing()).norm() < 1e-10 * lhs.norm().max(1.0));
}

#[test]
fn fast_path_matches_direct_sum() {
    for &n in &[16usize, 128, 1024] {
        let g = make_grid(WP, 0.15, n).unwrap();
        let field = random_field(g, n as u64);
        let mask = sinusoidal_mask(&g, WP, 1.3, 200.0, 0.4).unwrap();
        let fast = sfg_coherent(&field, &mask).unwrap();
        let slow = direct_spectrum(&field, &mask).unwrap();
        assert!(relative_sup(&fast.intensity, &slow) < 1e-9, "N={n}");
    }
}

#[test]
fn split_delay_against_pair_quadrature() {
    let g = make_grid(WP, 0.2, 1024).unwrap();
    let env = gaussian_envelope(&g, g.degenerate_freq(), 0.1, 2.0).unwrap();
    let field = coherent_pulse(&env, &PhaseMask::zero(&g)).unwrap();
    for &tau in &[0.0, 10.0, 35.0, 80.0] {
        let mask = split_delay_mask(&g, WP, tau).unwrap();
        let got = sfg_coherent(&field, &mask).unwrap().at_pump().total;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..g.n_pairs() {
            let a = env.amplitude()[g.upper_mode(k)] * env.amplitude()[g.lower_mode(k)];
            acc += Complex64::cis(mask.pair_sum(k)) * a;
        }
        let expect = (acc * 2.0 * g.spacing()).norm_sqr();
        assert!((got - expect).abs() < 1e-10 * expect.max(1e-3), "tau={tau}");
    }
}

fn moment_engine(g: SpectralGrid, detector: DetectorResponse) -> MomentEngine {
    let spec = SqueezedVacuumSpec::flat_band(g, 0.08, 10.0).unwrap();
    let pump = PumpLine::new(WP, 4.0 * g.spacing(), LineshapeKind::Lorentzian).unwrap();
    MomentEngine::new(&squeezed_moments(&spec), &pump, &detector).unwrap()
}

#[test]
fn classical_background_is_mask_independent() {
    let g = make_grid(WP, 0.06, 512).unwrap();
    let det = DetectorResponse::new(6.0 * g.spacing(), LineshapeKind::Gaussian).unwrap();
    let e = moment_engine(g, det);
    let base = e.spectrum(&PhaseMask::zero(&g)).unwrap();
    for mask in [
        split_delay_mask(&g, WP, 300.0).unwrap(),
        sinusoidal_mask(&g, WP, 1.2, 900.0, 1.0).unwrap(),
        antisymmetric_mask(&g, 4),
    ] {
        let s = e.spectrum(&mask).unwrap();
        assert_eq!(s.classical, base.classical);
    }
}

#[test]
fn moment_quantum_term_is_antisymmetric_invariant() {
    let g = make_grid(WP, 0.06, 512).unwrap();
    let e = moment_engine(g, DetectorResponse::none());
    let (_, q0, _) = e.at_pump(&PhaseMask::zero(&g)).unwrap();
    let (_, q1, _) = e.at_pump(&antisymmetric_mask(&g, 9)).unwrap();
    assert_eq!(q0.to_bits(), q1.to_bits());
    let (_, qd, _) = e
        .at_pump(&split_delay_mask(&g, WP, 500.0).unwrap())
        .unwrap();
    assert!(qd < 0.05 * q0);
}

#[test]
fn response_identity_and_conservation() {
    let g = make_grid(WP, 0.06, 256).unwrap();
    let e = moment_engine(g, DetectorResponse::none());
    let s = e.spectrum(&PhaseMask::zero(&g)).unwrap();
    let same = convolve_response(&s, &DetectorResponse::none()).unwrap();
    assert_eq!(same.intensity, s.intensity);
    let det = DetectorResponse::new(10.0 * g.spacing(), LineshapeKind::Lorentzian).unwrap();
    let blurred = convolve_response(&s, &det).unwrap();
    assert!((blurred.total_power() / s.total_power() - 1.0).abs() < 1e-9);
    let wide = DetectorResponse::new(10.0 * g.output_span(), LineshapeKind::Gaussian).unwrap();
    assert!(matches!(
        convolve_response(&s, &wide),
        Err(crate::error::Error::KernelTooWide { .. })
    ));
}

#[test]
fn response_of_delta_is_kernel() {
    let g = make_grid(WP, 0.06, 1024).unwrap();
    let mut intensity = vec![0.0; g.output_len()];
    intensity[g.center_output_index()] = 1.0 / g.spacing();
    let s = SfgSpectrum::deterministic(
        g,
        intensity,
        Provenance {
            source: SourceKind::Coherent,
            mask: MaskDescriptor::Zero,
            shots: None,
            master_seed: None,
            pump: None,
            detector: None,
        },
    );
    for shape in [LineshapeKind::Gaussian, LineshapeKind::Lorentzian] {
        let fwhm = 25.0 * g.spacing();
        let out = convolve_response(&s, &DetectorResponse::new(fwhm, shape).unwrap()).unwrap();
        let w = sampled_fwhm(&out.omegas(), &out.intensity).unwrap();
        assert!((w / fwhm - 1.0).abs() < 0.01, "{shape:?}: {w} vs {fwhm}");
    }
}

#[test]
fn ratio_formula_examples() {
    let b = crate::spectral::fwhm_wavelength_to_angular(1064.0, 60.0).unwrap();
    let gp = crate::spectral::fwhm_wavelength_to_angular(532.0, 0.01).unwrap();
    let gf = crate::spectral::fwhm_wavelength_to_angular(532.0, 0.03).unwrap();
    let r = qc_ratio_formula(b, gp, gf, 10.0).unwrap();
    assert!((r - 206.27).abs() < 0.05, "{r}");
    let big = qc_ratio_formula(b, gp, gf, 1e12).unwrap();
    assert!((big - b / (2.0 * (gp + gf))).abs() < 1e-6);
    let one = qc_ratio_formula(b, gp, gf, 1.0).unwrap();
    assert!((one / (b / (2.0 * (gp + gf))) - 2.0).abs() < 1e-12);
    assert!(qc_ratio_formula(b, 0.0, 0.0, 1.0).is_err());
    assert!(qc_ratio_formula(b, gp, gf, 0.0).is_err());
}

fn small_spec() -> SqueezedVacuumSpec {
    let g = make_grid(WP, 0.06, 64).unwrap();
    SqueezedVacuumSpec::flat_band(g, 0.08, 2.0).unwrap()
}

#[test]
fn ensemble_is_thread_count_independent() {
    let spec = small_spec()
        .with_pump_line(3e-3, LineshapeKind::Lorentzian)
        .unwrap()
        .with_envelope_jitter(0.1)
        .unwrap();
    let g = *spec.grid();
    let mask = sinusoidal_mask(&g, WP, 0.5, 400.0, 0.3).unwrap();
    let det = DetectorResponse::new(3.0 * g.spacing(), LineshapeKind::Gaussian).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sfg_ensemble(&spec, &mask, 1000, 42, &det).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a, b);
    let c = sfg_ensemble(&spec, &mask, 1000, 43, &det).unwrap();
    assert_ne!(a.intensity, c.intensity);
    assert!(sfg_ensemble(&spec, &mask, 0, 1, &det).is_err());
}

#[test]
fn ensemble_matches_moments() {
    let spec = small_spec();
    let g = *spec.grid();
    let shots = 8000;
    let det = DetectorResponse::none();
    let pump = PumpLine::new(WP, 0.0, LineshapeKind::Lorentzian).unwrap();
    let exact = sfg_gaussian_decomposition(
        &squeezed_moments(&spec).classical_surrogate(),
        &PhaseMask::zero(&g),
        &pump,
        &det,
    )
    .unwrap();
    let ens = sfg_ensemble(&spec, &PhaseMask::zero(&g), shots, 5, &det).unwrap();
    let p = ens.at_pump();
    let pe = exact.at_pump();
    let q = p.quantum.unwrap();
    let qe = pe.quantum.unwrap();
    assert!(
        (q - qe).abs() < 5.0 * p.stderr_quantum.unwrap(),
        "{q} vs {qe}"
    );
    // classical background away from the pump bin
    let j = g.center_output_index() + 20;
    let ce = exact.classical.as_ref().unwrap()[j];
    let c = ens.classical.as_ref().unwrap()[j];
    let se = ens.stderr.as_ref().unwrap()[j];
    assert!((c - ce).abs() < 5.0 * se, "{c} vs {ce} ± {se}");
    assert!(ens
        .intensity
        .iter()
        .zip(ens.quantum.as_ref().unwrap())
        .all(|(t, q)| t >= q));
}

#[test]
fn uncorrelated_control_has_no_quantum_peak() {
    let spec = small_spec();
    let g = *spec.grid();
    let opts = EnsembleOptions {
        shots: 4000,
        master_seed: 8,
        source: StochasticSource::Uncorrelated,
    };
    let s =
        sfg_ensemble_with(&spec, &PhaseMask::zero(&g), opts, &DetectorResponse::none()).unwrap();
    let p = s.at_pump();
    assert!(p.quantum.unwrap() < 0.05 * p.classical.unwrap());
    assert_eq!(s.provenance.source, SourceKind::UncorrelatedStochastic);
}

#[test]
fn csv_has_header_and_rows() {
    let g = make_grid(WP, 0.1, 32).unwrap();
    let s = sfg_coherent(&random_field(g, 2), &PhaseMask::zero(&g)).unwrap();
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_rad_per_fs,lambda_nm,I_total,I_q,I_c,stderr"
    );
    assert_eq!(lines.count(), 63);
}

#[test]
fn ensemble_matches_moments_with_pump_linewidth() {
    let spec = small_spec()
        .with_pump_line(8.0 * small_spec().grid().spacing(), LineshapeKind::Gaussian)
        .unwrap();
    let g = *spec.grid();
    let pump = PumpLine::new(WP, spec.pump_linewidth(), LineshapeKind::Gaussian).unwrap();
    let det = DetectorResponse::none();
    let exact = sfg_gaussian_decomposition(
        &squeezed_moments(&spec).classical_surrogate(),
        &PhaseMask::zero(&g),
        &pump,
        &det,
    )
    .unwrap();
    let ens = sfg_ensemble(&spec, &PhaseMask::zero(&g), 8000, 21, &det).unwrap();
    for d in [0i64, 3, -6] {
        let j = (g.center_output_index() as i64 + d) as usize;
        let q = ens.quantum.as_ref().unwrap()[j];
        let qe = exact.quantum.as_ref().unwrap()[j];
        // the sampled detuning histogram adds ~1/√M relative scatter per bin
        assert!((q / qe - 1.0).abs() < 0.1, "bin {d}: {q} vs {qe}");
    }
    let p = ens.at_pump();
    let pe = exact.at_pump();
    let r = p.quantum.unwrap() / p.classical.unwrap();
    let re = pe.quantum.unwrap() / pe.classical.unwrap();
    assert!((r / re - 1.0).abs() < 0.15, "{r} vs {re}");
}
