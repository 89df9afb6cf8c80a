use laser_entropy::fock::{
    coherent_fock_vector, coherent_overlap_sq, multi_segment_purity, phase_averaged_state,
    single_segment_purity_quadrature, uniform_phase_purity, CoherentAmplitude,
};
use laser_entropy::spectral::{
    reduced_ground_eigenvalue, richardson_reduced_eigenvalue, Discretization, SpectralConfig,
};
use laser_entropy::stochastic::{estimate_u, segment_purity_mc, PathConfig};
use laser_entropy::{beam_from_rates, thermal};
use nalgebra::DMatrix;

/// Large-q expansion of the lowest even Mathieu characteristic value mapped to
/// `2E₀`, four correction terms.
fn mathieu_asymptotic(c: f64) -> f64 {
    let h = c.sqrt();
    let a0 = -2.0 * c + 2.0 * h - 0.25 - 4.0 / (128.0 * h) - 48.0 / (4096.0 * h * h)
        - 848.0 / (131072.0 * h.powi(3));
    (a0 + 2.0 * c) / (2.0 * h)
}

/// Mathieu `a₀(q)` from the Hill determinant in the `cos 2nx` basis, dense.
fn mathieu_hill(q: f64, terms: usize) -> f64 {
    let mut m = DMatrix::<f64>::zeros(terms, terms);
    for n in 0..terms {
        m[(n, n)] = (2 * n) as f64 * (2 * n) as f64;
        if n + 1 < terms {
            let off = if n == 0 { q * 2f64.sqrt() } else { q };
            m[(n, n + 1)] = off;
            m[(n + 1, n)] = off;
        }
    }
    m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn eigenvalue_matches_mathieu_expansion() {
    for c in [100.0, 1e3, 1e4] {
        let fd = richardson_reduced_eigenvalue(c, 2048).unwrap();
        let want = mathieu_asymptotic(c);
        assert!((fd - want).abs() < 2e-6, "c={c}: {fd} vs {want}");
    }
    assert!((mathieu_asymptotic(100.0) - 0.98734).abs() < 1e-5);
    assert!((mathieu_asymptotic(1e4) - 0.99875).abs() < 1e-5);
}

#[test]
fn eigenvalue_matches_hill_determinant() {
    for c in [4.0, 25.0, 100.0] {
        let a0 = mathieu_hill(-c, 200);
        let want = (a0 + 2.0 * c) / (2.0 * c.sqrt());
        let fourier = reduced_ground_eigenvalue(c, &SpectralConfig::fourier(64)).unwrap();
        assert!((fourier.reduced_eigenvalue - want).abs() < 1e-11, "c={c}");
        let fd = richardson_reduced_eigenvalue(c, 1024).unwrap();
        assert!((fd - want).abs() < 1e-7, "c={c}: {fd} vs {want}");
    }
}

#[test]
fn discretizations_agree_on_prefactor() {
    let c = 25.0;
    let fd = reduced_ground_eigenvalue(c, &SpectralConfig::finite_difference(2048)).unwrap();
    let fo = reduced_ground_eigenvalue(c, &SpectralConfig { grid_points: 128, discretization: Discretization::FourierCosine }).unwrap();
    assert!((fd.long_time_prefactor - fo.long_time_prefactor).abs() < 1e-5);
    assert!(fo.long_time_prefactor > 0.0 && fo.long_time_prefactor < 2.0);
}

#[test]
fn feynman_kac_curve_follows_ground_state() {
    let c = 25.0;
    let ground = reduced_ground_eigenvalue(c, &SpectralConfig::fourier(128)).unwrap();
    let config = PathConfig { step: 2.5e-3, horizon: 4.0, n_paths: 40_000, seed: 11, ..PathConfig::default() };
    let curve = estimate_u(&config, c, &[2.0, 4.0]).unwrap();
    for (i, &tau) in curve.times.iter().enumerate() {
        let want = ground.long_time_prefactor * (-ground.reduced_eigenvalue * tau).exp();
        let z = (curve.u_mean[i] - want) / curve.u_stderr[i];
        // time step bias is O(step); allow it on top of the noise
        assert!(z.abs() < 4.0 || (curve.u_mean[i] / want - 1.0).abs() < 5e-3, "tau={tau}: z={z}");
    }
}

#[test]
fn segment_mc_matches_exact_tensor_sum() {
    let beam = beam_from_rates(1.5, 0.8, 1.77e15).unwrap();
    for k in [2usize, 3] {
        let t = 1.2;
        let dt = t / k as f64;
        let r = (beam.photon_flow() * dt).sqrt();
        let exact = multi_segment_purity(r, beam.linewidth() * dt, k, 40).unwrap();
        let mc = segment_purity_mc(&beam, k, t, 200_000, 5).unwrap();
        assert!(mc.z_score(exact).abs() < 4.0, "K={k}: {} ± {} vs {exact}", mc.mean, mc.stderr);
    }
}

#[test]
fn single_segment_tensor_sum_equals_quadrature() {
    for r in [0.3, 1.0, 2.0] {
        for v in [0.05, 0.4, 3.0] {
            let a = multi_segment_purity(r, v, 1, 60).unwrap();
            let b = single_segment_purity_quadrature(r, 2.0 * v).unwrap();
            assert!((a - b).abs() < 1e-11, "r={r} v={v}");
        }
    }
}

#[test]
fn stderr_scales_as_inverse_root_n() {
    let beam = beam_from_rates(2.0, 1.0, 1.77e15).unwrap();
    let small = segment_purity_mc(&beam, 4, 1.0, 10_000, 3).unwrap();
    let large = segment_purity_mc(&beam, 4, 1.0, 160_000, 3).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 4.0 - 1.0).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn dephasing_reduces_purity() {
    let r = 1.4;
    let mut prev = 1.0 + 1e-12;
    for v in [0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
        let rho = phase_averaged_state(r, v, 64, 40).unwrap();
        let p = rho.purity();
        assert!(p <= prev + 1e-12, "v={v}");
        assert!(rho.eigenvalues().iter().all(|&e| e > -1e-12));
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        prev = p;
    }
    assert!(prev >= uniform_phase_purity(r) - 1e-10);
}

#[test]
fn overlap_is_symmetric_and_matches_fock_sum() {
    let a = CoherentAmplitude::new(1.1, 0.3).unwrap();
    let b = CoherentAmplitude::new(0.6, -2.0).unwrap();
    assert_eq!(coherent_overlap_sq(&a, &b), coherent_overlap_sq(&b, &a));
    let ip = coherent_fock_vector(&a, 40).inner(&coherent_fock_vector(&b, 40)).norm_sqr();
    let direct = (-(a.to_complex() - b.to_complex()).norm_sqr()).exp();
    assert!((ip - direct).abs() < 1e-13);
}

#[test]
fn thermal_constants_from_zeta_series() {
    // ∫ x/(eˣ-1) = Σ 1/k², ∫ ln coth(x/2) = 2 Σ_odd 1/k²
    let n = 200_000u64;
    let zeta2: f64 = (1..n).map(|k| 1.0 / (k as f64).powi(2)).sum::<f64>() + 1.0 / n as f64;
    let odd: f64 = (0..n).map(|j| 1.0 / ((2 * j + 1) as f64).powi(2)).sum::<f64>() + 1.0 / (4.0 * n as f64);
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((zeta2 / two_pi / thermal::POWER_CONSTANT - 1.0).abs() < 1e-9);
    assert!((2.0 * odd / two_pi / thermal::RENYI2_CONSTANT - 1.0).abs() < 1e-9);
    assert!((thermal::power_constant_quadrature().unwrap() / thermal::POWER_CONSTANT - 1.0).abs() < 1e-10);
    assert!((thermal::renyi2_constant_quadrature().unwrap() / thermal::RENYI2_CONSTANT - 1.0).abs() < 1e-10);
    assert!((thermal::von_neumann_constant_quadrature().unwrap() / thermal::VON_NEUMANN_CONSTANT - 1.0).abs() < 1e-10);
}
