use nks3::csvio::{read_epsilon, read_immersion, write_epsilon, write_immersion};
use nks3::examples::example2_grid;
use nks3::grid::{GridSpec, HSurfaceGrid};
use nks3::quat::Vec3;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsers_never_panic_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = read_immersion(bytes.as_slice());
        let _ = read_epsilon(bytes.as_slice());
    }

    #[test]
    fn parsers_never_panic_on_numeric_rows(
        rows in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 5), 0..40),
        cut in 0usize..10,
    ) {
        let mut text = String::from("u,v,x,y,z\n");
        for r in &rows {
            let line: Vec<String> = r.iter().take(5 - cut.min(1)).map(|x| x.to_string()).collect();
            text.push_str(&line.join(","));
            text.push('\n');
        }
        let _ = read_epsilon(text.as_bytes());
        let _ = read_immersion(text.replace("u,v,x,y,z", "u,v,p0,p1,p2,p3,q0,q1,q2,q3").as_bytes());
    }

    #[test]
    fn epsilon_round_trip(
        u0 in -10.0f64..10.0, v0 in -10.0f64..10.0,
        du in 1e-3f64..1.0, dv in 1e-3f64..1.0,
        nu in 5usize..12, nv in 5usize..12,
        a in -5.0f64..5.0,
    ) {
        let spec = GridSpec::new(u0, v0, du, dv, nu, nv).unwrap();
        let hs = HSurfaceGrid::from_fn(spec, |u, v| Vec3::new(a * u, v.sin(), u * v));
        let mut buf = Vec::new();
        write_epsilon(&hs, &mut buf).unwrap();
        let back = read_epsilon(buf.as_slice()).unwrap();
        prop_assert_eq!(back.eps, hs.eps);
        prop_assert_eq!((back.spec.nu, back.spec.nv), (nu, nv));
        prop_assert!((back.spec.du - du).abs() < 1e-12 && (back.spec.dv - dv).abs() < 1e-12);
    }
}

#[test]
fn immersion_write_is_deterministic() {
    let spec = GridSpec::centred(0.0, 0.0, 0.01, 0.01, 9, 9).unwrap();
    let g = example2_grid(&spec, 0.2).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_immersion(&g, &mut a).unwrap();
    write_immersion(&g, &mut b).unwrap();
    assert_eq!(a, b);
    assert_eq!(read_immersion(a.as_slice()).unwrap(), g);
}
