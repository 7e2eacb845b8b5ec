use proptest::prelude::*;

use cpfit::data::{self, CountHistogram};
use cpfit::dist::{self, DistributionSpec};
use cpfit::estimators::{self, DenominatorMode, FitConfig, PsFamily, SampleStats};
use cpfit::spectrum;

fn naive(weights: &[f64], n_dft: usize) -> (Vec<f64>, Vec<f64>) {
    (0..n_dft)
        .map(|j| {
            weights.iter().enumerate().fold((0.0, 0.0), |(a, b), (n, &w)| {
                let t = 2.0 * std::f64::consts::PI * ((j * n) % n_dft) as f64 / n_dft as f64;
                (a + w * t.cos(), b + w * t.sin())
            })
        })
        .unzip()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..128).prop_filter("not all zero", |w| w.iter().any(|&x| x > 1e-3))
}

fn histogram() -> impl Strategy<Value = CountHistogram> {
    prop::collection::vec(0u64..60, 2..40)
        .prop_filter("at least two observations", |c| c.iter().sum::<u64>() >= 2)
        .prop_map(|c| CountHistogram::new(c).unwrap())
}

fn spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.1f64..8.0).prop_map(|l| DistributionSpec::poisson(l).unwrap()),
        (0.1f64..8.0, 0.1f64..8.0).prop_map(|(l, f)| DistributionSpec::neyman(l, f).unwrap()),
        (0.1f64..8.0, 1u32..15, 0.05f64..0.95).prop_map(|(l, k, p)| DistributionSpec::poisson_binomial(l, k, p).unwrap()),
        (0.1f64..8.0, 1u32..15, 0.05f64..2.0).prop_map(|(l, k, p)| DistributionSpec::poisson_pascal(l, k, p).unwrap()),
        (0.1f64..8.0, 0.05f64..0.9).prop_map(|(l, p)| DistributionSpec::geometric_poisson(l, p).unwrap()),
        (0.2f64..15.0, 0.1f64..0.9).prop_map(|(k, p)| DistributionSpec::negative_binomial(k, p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_matches_direct_sums(w in weights(), extra in 0usize..64) {
        let n_dft = w.len() + extra;
        let sums = spectrum::dft_sums(&w, n_dft).unwrap();
        let (a, b) = naive(&w, n_dft);
        for j in 0..n_dft {
            prop_assert!((sums.a[j] - a[j]).abs() <= 1e-10);
            prop_assert!((sums.b[j] - b[j]).abs() <= 1e-10);
        }
    }

    #[test]
    fn spectrum_is_normalized_and_mirrored(w in weights(), log_n in 7u32..11) {
        let n_dft = 1usize << log_n;
        let ps = spectrum::power_spectrum(&w, n_dft).unwrap();
        let psi = ps.psi();
        prop_assert_eq!(psi[0], 1.0);
        for j in 1..n_dft {
            prop_assert_eq!(psi[j], psi[n_dft - j]);
            prop_assert!(psi[j] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn peaks_ignore_weight_scale(w in weights(), scale in 0.01f64..100.0) {
        let scaled: Vec<f64> = w.iter().map(|x| x * scale).collect();
        let a = spectrum::find_peaks(&spectrum::power_spectrum(&w, 256).unwrap());
        let b = spectrum::find_peaks(&spectrum::power_spectrum(&scaled, 256).unwrap());
        let grid = |p: &[spectrum::PeakCandidate]| p.iter().map(|c| (c.grid_index, c.source)).collect::<Vec<_>>();
        prop_assert_eq!(grid(&a), grid(&b));
        prop_assert_eq!(a.last().unwrap().source, spectrum::PeakSource::Endpoint);
    }

    #[test]
    fn candidates_sorted_with_alias_branches(w in weights(), m_max in 0u32..4) {
        let peaks = spectrum::find_peaks(&spectrum::power_spectrum(&w, 128).unwrap());
        let cands = spectrum::candidate_means(&peaks, m_max);
        prop_assert_eq!(cands.len(), peaks.len() * (m_max as usize + 1));
        for pair in cands.windows(2) {
            prop_assert!((pair[0].grid_index, pair[0].alias_m) < (pair[1].grid_index, pair[1].alias_m));
        }
        for c in &cands {
            prop_assert!((c.e_b * c.shifted_nu() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pmf_is_a_sub_probability(s in spec(), n in 1usize..300) {
        let pmf = dist::family_pmf(&s, n).unwrap();
        prop_assert_eq!(pmf.len(), n);
        prop_assert!(pmf.masses().iter().all(|&p| (0.0..=1.0).contains(&p)));
        prop_assert!(pmf.total_mass() <= 1.0 + 1e-12);
        if let Some(h) = pmf.scaled() {
            prop_assert_eq!(h[0], 1.0);
        }
    }

    #[test]
    fn moment_estimators_invert_exact_moments(l in 0.2f64..10.0, phi in 0.1f64..10.0, k in 1u32..20, p in 0.05f64..0.9) {
        let exact = |spec: DistributionSpec| {
            let m = dist::moments(&spec).unwrap();
            SampleStats::from_summary(100, m.mean, m.variance, DenominatorMode::NMinusOne).unwrap()
        };
        let (l1, phi1) = estimators::mom_neyman(&exact(DistributionSpec::neyman(l, phi).unwrap())).unwrap();
        prop_assert!((l1 / l - 1.0).abs() < 1e-9 && (phi1 / phi - 1.0).abs() < 1e-9);
        let (l2, p2) = estimators::mom_geometric(&exact(DistributionSpec::geometric_poisson(l, p).unwrap())).unwrap();
        prop_assert!((l2 / l - 1.0).abs() < 1e-9 && (p2 / p - 1.0).abs() < 1e-9);
        if k >= 2 {
            let (l3, p3) = estimators::mom_poisson_binomial(&exact(DistributionSpec::poisson_binomial(l, k, p).unwrap()), k).unwrap();
            prop_assert!((l3 / l - 1.0).abs() < 1e-9 && (p3 / p - 1.0).abs() < 1e-9);
        }
        let (l4, p4) = estimators::mom_poisson_pascal(&exact(DistributionSpec::poisson_pascal(l, k, p).unwrap()), k).unwrap();
        prop_assert!((l4 / l - 1.0).abs() < 1e-9 && (p4 / p - 1.0).abs() < 1e-9);
        let kk = f64::from(k) * 0.7;
        let (k5, p5) = estimators::mom_negative_binomial(&exact(DistributionSpec::negative_binomial(kk, p).unwrap()), false).unwrap();
        prop_assert!((k5 / kk - 1.0).abs() < 1e-9 && (p5 / p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_pascal_mapping_round_trips(l in 0.01f64..50.0, p in 0.001f64..0.999) {
        let pascal = dist::geometric_to_pascal(l, p).unwrap();
        let back = dist::pascal_to_geometric(pascal.lambda, pascal.p).unwrap();
        prop_assert!((back.lambda / l - 1.0).abs() < 1e-12);
        prop_assert!((back.p / p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ps_estimate_ignores_count_scale(h in histogram(), factor in 2u64..6) {
        let config = FitConfig { n_dft: 256, ..FitConfig::default() };
        let scaled = h.scaled(factor).unwrap();
        let a = estimators::ps_estimate(&h, PsFamily::NeymanTypeA, &config);
        let b = estimators::ps_estimate(&scaled, PsFamily::NeymanTypeA, &config);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.peak.map(|p| (p.grid_index, p.alias_m)), b.peak.map(|p| (p.grid_index, p.alias_m)));
                let (pa, pb) = (a.spec.parameters(), b.spec.parameters());
                for ((_, x), (_, y)) in pa.iter().zip(&pb) {
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
                }
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "outcomes differ: {:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn dataset_text_round_trips(h in histogram(), name in "[a-z ]{0,12}") {
        let h = if name.trim().is_empty() { h } else { h.with_name(name.trim()) };
        let back = data::parse_dataset(&h.to_text()).unwrap();
        prop_assert_eq!(back, h);
    }
}

#[test]
fn simulation_is_reproducible() {
    let spec = DistributionSpec::poisson_pascal(1.5, 3, 0.4).unwrap();
    let a = data::simulate(&spec, 150_000, 11).unwrap();
    let b = data::simulate(&spec, 150_000, 11).unwrap();
    let c = data::simulate(&spec, 150_000, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn simulated_pmf_matches_model() {
    // Parameter sets of the spectrum example; a million draws each.
    let specs = [
        DistributionSpec::neyman(0.4, 10.0).unwrap(),
        DistributionSpec::poisson_binomial(0.3, 20, 0.5).unwrap(),
        DistributionSpec::poisson_pascal(0.5, 100, 0.1).unwrap(),
    ];
    for spec in specs {
        let hist = data::simulate(&spec, 1_000_000, 5).unwrap();
        let freq = hist.frequencies();
        let pmf = dist::family_pmf(&spec, freq.len()).unwrap();
        let dev = freq.iter().zip(pmf.masses()).map(|(f, p)| (f - p).abs()).fold(0.0, f64::max);
        assert!(dev < 5e-3, "{spec}: max deviation {dev}");
    }
}
