use std::f64::consts::TAU;

use proptest::prelude::*;
use rabi_thermo::correlation::{corr_closed, corr_series, stable_weights};
use rabi_thermo::dynamics::{effective_frequency, SingleTermSolution};
use rabi_thermo::exact::{evolve_exact, FockTruncation, QubitInit};
use rabi_thermo::model::{polaron_scalars, PolaronScalars};
use rabi_thermo::thermometry::{fit_frequency, invert_temperature};
use rabi_thermo::{RabiParams, ThermalOscillator, UnitSystem};

const NAT: UnitSystem = UnitSystem::Natural;

fn scalars(omega: f64, g: f64, t: f64) -> PolaronScalars {
    let p = RabiParams::new(0.0, 1.0, omega, g).unwrap();
    let osc = ThermalOscillator::from_temperature(omega, t, NAT).unwrap();
    polaron_scalars(&p, &osc).unwrap()
}

fn couplings() -> impl Strategy<Value = (f64, f64, f64)> {
    // (ω, g, T) with |α|² ≤ 1 and N ≤ 5.
    (0.2f64..3.0, 0.0f64..0.5, 0.01f64..5.0)
        .prop_map(|(w, ratio, tr)| (w, ratio * w, tr * w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn correlation_is_hermitian_periodic_and_bounded(
        (w, g, t) in couplings(),
        tau in -50.0f64..50.0,
    ) {
        let s = scalars(w, g, t);
        let c = corr_closed(&s, tau);
        prop_assert!((corr_closed(&s, -tau) - c.conj()).norm() < 1e-14);
        prop_assert!((corr_closed(&s, tau + TAU / w) - c).norm() < 1e-9);
        prop_assert!(c.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn scalar_identities((w, g, t) in couplings()) {
        let s = scalars(w, g, t);
        prop_assert!(s.absorption >= 0.0 && s.emission >= s.absorption);
        prop_assert!((s.absorption + s.emission - s.b).abs() <= 1e-14 * s.b.max(1e-300));
        prop_assert!((4.0 * s.absorption * s.emission - s.z * s.z).abs() <= 1e-13 * (s.z * s.z).max(1e-300));
        prop_assert!(s.z <= s.b);
    }

    #[test]
    fn weights_are_a_distribution_with_detailed_balance((w, g, t) in couplings()) {
        let s = scalars(w, g, t);
        let series = stable_weights(&s, 60);
        prop_assert!((series.total() - 1.0).abs() < 1e-13);
        prop_assert!(series.iter().all(|(_, c)| c >= 0.0));
        for n in 1..6i64 {
            let ratio = series.ln_weight(n) - series.ln_weight(-n);
            prop_assert!((ratio + n as f64 * s.beta_omega).abs() < 1e-9 * (1.0 + n as f64 * s.beta_omega));
        }
    }

    #[test]
    fn series_matches_closed_form((w, g, t) in couplings(), tau in -20.0f64..20.0) {
        let s = scalars(w, g, t);
        let series = stable_weights(&s, 60);
        prop_assert!((corr_series(&series, tau) - corr_closed(&s, tau)).norm() < 1e-12);
    }

    #[test]
    fn single_term_stays_physical(
        (w, g, t) in couplings(),
        eps in 0.0f64..1.0,
        delta in 0.01f64..1.0,
        rho0 in 0.0f64..=1.0,
        time in 0.0f64..200.0,
    ) {
        let p = RabiParams::new(eps, delta, w, g).unwrap();
        let osc = ThermalOscillator::from_temperature(w, t, NAT).unwrap();
        let sol = SingleTermSolution::new(&p, &osc, rho0).unwrap();
        let r00 = sol.rho00(time);
        let r10 = sol.rho10(time);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r00));
        prop_assert!(r10.norm_sqr() <= r00 * (1.0 - r00) + 1e-12);
        prop_assert!(sol.omega_eff <= p.rabi_frequency() * (1.0 + 1e-14));
    }

    #[test]
    fn effective_frequency_falls_with_temperature(
        (w, g, t) in couplings(),
        bump in 1.01f64..3.0,
    ) {
        prop_assume!(g > 0.01 * w);
        let p = RabiParams::new(0.0, 1.0, w, g).unwrap();
        let at = |t| effective_frequency(&p, &ThermalOscillator::from_temperature(w, t, NAT).unwrap()).unwrap();
        prop_assert!(at(t * bump) < at(t));
    }

    #[test]
    fn temperature_inversion_roundtrips(ratio in 0.05f64..0.4, t in 0.5f64..3.0) {
        let w = 1.0;
        let p = RabiParams::new(0.0, 0.1, w, ratio * w).unwrap();
        let omega = effective_frequency(&p, &ThermalOscillator::from_temperature(w, t, NAT).unwrap()).unwrap();
        let back = invert_temperature(omega, &p, NAT, (0.25, 6.0)).unwrap();
        prop_assert!((back - t).abs() < 1e-8 * t, "{back} vs {t}");
    }

    #[test]
    fn cosine_fit_recovers_frequency(
        w in 0.5f64..2.0,
        amp in 0.05f64..0.5,
        offset in 0.2f64..0.8,
        n_samples in 64usize..400,
    ) {
        let dt = 0.1;
        let times: Vec<f64> = (0..n_samples).map(|k| k as f64 * dt).collect();
        let values: Vec<f64> = times.iter().map(|t| offset + amp * (w * t).cos()).collect();
        let fit = fit_frequency(&times, &values, (0.25, 3.0)).unwrap();
        prop_assert!((fit.omega_fit - w).abs() < 1e-7 * w, "{} vs {w}", fit.omega_fit);
        prop_assert!((fit.amplitude - amp).abs() < 1e-6);
        prop_assert!((fit.offset - offset).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_dynamics_stays_physical(
        eps in 0.0f64..0.5,
        delta in 0.05f64..0.5,
        ratio in 0.0f64..0.4,
        tr in 0.05f64..1.0,
        rho0 in 0.0f64..=1.0,
    ) {
        let w = 1.0;
        let p = RabiParams::new(eps, delta, w, ratio * w).unwrap();
        let osc = ThermalOscillator::from_temperature(w, tr, NAT).unwrap();
        let times: Vec<f64> = (0..64).map(|k| k as f64 * 0.7).collect();
        let traj = evolve_exact(&p, QubitInit::population(rho0), &osc, FockTruncation::auto(&p, &osc), &times).unwrap();
        prop_assert!(traj.positivity_violation(1e-10).is_none());
        prop_assert!((traj.rho00[0] - rho0).abs() < 1e-10);
    }
}
