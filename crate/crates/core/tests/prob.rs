mod common;

use alphaleak_core::prob::{index_labels, pair_label};
use alphaleak_core::{Axis, Channel, Joint3, Marginal, Pmf};
use common::*;
use proptest::prelude::*;

fn z_given_xy(r: &mut impl rand::Rng, nx: usize, ny: usize, nz: usize) -> Channel {
    let inputs: Vec<String> = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| pair_label(&x.to_string(), &y.to_string())))
        .collect();
    let m: Vec<f64> = (0..nx * ny).flat_map(|_| simplex(r, nz)).collect();
    Channel::new(inputs, index_labels(nz), m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_then_marginalize_recovers_inputs(
        seed in any::<u64>(), nx in 1usize..4, ny in 1usize..4, nz in 1usize..4,
    ) {
        let mut r = rng(seed);
        let px = random_pmf(&mut r, nx);
        let ch_yx = random_channel(&mut r, nx, ny);
        let ch_z = z_given_xy(&mut r, nx, ny, nz);
        let j = Joint3::compose(&px, &ch_yx, &ch_z).unwrap();

        let mx = j.marginal(Axis::X);
        for (a, b) in mx.probs().iter().zip(px.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let (_, ch) = j.xy_marginal().decompose();
        for x in 0..nx {
            for (a, b) in ch.row(x).iter().zip(ch_yx.row(x)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
        // P(z | x, y) from the tensor
        for x in 0..nx {
            for y in 0..ny {
                let m: f64 = (0..nz).map(|z| j.get(x, y, z)).sum();
                let row = ch_z.row_by_label(&pair_label(&x.to_string(), &y.to_string())).unwrap();
                for z in 0..nz {
                    prop_assert!((j.get(x, y, z) / m - row[z]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conditioning_recombines_to_the_joint(seed in any::<u64>(), nz in 1usize..4) {
        let mut r = rng(seed);
        let j = random_joint(&mut r, 3, 2, nz);
        let pz = j.marginal(Axis::Z);
        let mut rebuilt = vec![0.0; j.data().len()];
        for (zi, z) in j.z_labels().iter().enumerate() {
            let c = j.condition_on_event(z).unwrap();
            let w = pz.probs()[zi];
            for x in 0..3 {
                for y in 0..2 {
                    rebuilt[(x * 2 + y) * nz + zi] += w * c.get(x, y);
                }
            }
        }
        for (a, b) in rebuilt.iter().zip(j.data()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_preserve_mass(seed in any::<u64>()) {
        let mut r = rng(seed);
        let j = random_joint(&mut r, 2, 3, 2);
        for keep in [vec![Axis::X], vec![Axis::Y, Axis::Z], vec![Axis::X, Axis::Y, Axis::Z]] {
            let total: f64 = match j.marginalize(&keep).unwrap() {
                Marginal::One(p) => p.probs().iter().sum(),
                Marginal::Two(p) => p.data().iter().sum(),
                Marginal::Three(p) => p.data().iter().sum(),
            };
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_outside_tolerance_is_rejected(dev in 2e-9f64..0.5) {
        prop_assert!(Pmf::from_probs(&[0.5, 0.5 + dev]).is_err());
        prop_assert!(Pmf::from_probs(&[0.5, 0.5 - dev]).is_err());
    }
}
