use morphplay_core::geometry::{
    axis_rotation_matrix, compose, determinant, invert, orthonormality_error, rotate_about_pivot,
    translate, AngleDeg, PrincipalAxis, RigidTransform, RotationSense, RotationSpec, Vec3,
};
use proptest::prelude::*;

/// Homogeneous 4×4 pipeline `T(c) · R · T(−c)` with `R` from the general
/// Rodrigues formula. Shares nothing with the library's closed forms.
mod oracle {
    pub type M4 = [[f64; 4]; 4];

    pub fn translation(t: [f64; 3]) -> M4 {
        [
            [1.0, 0.0, 0.0, t[0]],
            [0.0, 1.0, 0.0, t[1]],
            [0.0, 0.0, 1.0, t[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    pub fn rodrigues(axis: [f64; 3], radians: f64) -> M4 {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
        let (s, c) = radians.sin_cos();
        let k = [[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]];
        let mut m = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                let k2: f64 = (0..3).map(|l| k[i][l] * k[l][j]).sum();
                m[i][j] = if i == j { 1.0 } else { 0.0 } + s * k[i][j] + (1.0 - c) * k2;
            }
        }
        m[3][3] = 1.0;
        m
    }

    pub fn mul(a: &M4, b: &M4) -> M4 {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    pub fn apply(m: &M4, p: [f64; 3]) -> [f64; 3] {
        let h = [p[0], p[1], p[2], 1.0];
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|k| m[i][k] * h[k]).sum();
        }
        out
    }

    /// `ccw` is the positive right-hand-rule direction.
    pub fn rotate(p: [f64; 3], axis: usize, ccw: bool, degrees: f64, pivot: [f64; 3]) -> [f64; 3] {
        let mut dir = [0.0; 3];
        dir[axis] = 1.0;
        let signed = if ccw { degrees } else { -degrees };
        let m = mul(
            &translation(pivot),
            &mul(
                &rodrigues(dir, signed.to_radians()),
                &translation([-pivot[0], -pivot[1], -pivot[2]]),
            ),
        );
        apply(&m, p)
    }
}

fn axis_strategy() -> impl Strategy<Value = PrincipalAxis> {
    prop_oneof![
        Just(PrincipalAxis::X),
        Just(PrincipalAxis::Y),
        Just(PrincipalAxis::Z)
    ]
}

fn sense_strategy() -> impl Strategy<Value = RotationSense> {
    prop_oneof![Just(RotationSense::Cw), Just(RotationSense::Ccw)]
}

fn vec_strategy(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn spec_strategy() -> impl Strategy<Value = RotationSpec> {
    (
        axis_strategy(),
        sense_strategy(),
        -180.0f64..=180.0,
        vec_strategy(50.0),
    )
        .prop_map(|(axis, sense, deg, pivot)| {
            RotationSpec::new(axis, sense, AngleDeg::new(deg).unwrap(), pivot).unwrap()
        })
}

fn max_diff(a: Vec3, b: Vec3) -> f64 {
    (a.x - b.x)
        .abs()
        .max((a.y - b.y).abs())
        .max((a.z - b.z).abs())
}

#[test]
fn worked_examples_against_oracle() {
    // (2,0,0) about z, ccw 90°, pivot (1,0,0)
    let o = oracle::rotate([2.0, 0.0, 0.0], 2, true, 90.0, [1.0, 0.0, 0.0]);
    assert!((o[0] - 1.0).abs() < 1e-12 && (o[1] - 1.0).abs() < 1e-12 && o[2].abs() < 1e-12);
    // (2,0,0) about z, ccw 30°, pivot origin
    let o = oracle::rotate([2.0, 0.0, 0.0], 2, true, 30.0, [0.0; 3]);
    assert!((o[0] - 1.7320508).abs() < 1e-6 && (o[1] - 1.0).abs() < 1e-6);
}

#[test]
fn compose_thirty_and_sixty_equals_ninety() {
    let pivot = Vec3::new(1.0, -2.0, 0.5);
    let mk = |deg| {
        RotationSpec::new(
            PrincipalAxis::Y,
            RotationSense::Ccw,
            AngleDeg::new(deg).unwrap(),
            pivot,
        )
        .unwrap()
        .to_transform()
    };
    let chained = compose(&mk(60.0), &mk(30.0));
    let single = mk(90.0);
    let mut seed = 0x2545F4914F6CDD1Du64;
    for _ in 0..100 {
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed % 20_000) as f64 / 100.0 - 100.0
        };
        let p = Vec3::new(next(), next(), next());
        assert!(max_diff(chained.apply(p), single.apply(p)) < 1e-9);
    }
}

#[test]
fn inverse_of_pivot_rotation_is_opposite_sense() {
    let pivot = Vec3::new(1.0, 2.0, 3.0);
    let a = AngleDeg::new(37.0).unwrap();
    let fwd = RotationSpec::new(PrincipalAxis::Z, RotationSense::Ccw, a, pivot)
        .unwrap()
        .to_transform();
    let back = RotationSpec::new(PrincipalAxis::Z, RotationSense::Cw, a, pivot)
        .unwrap()
        .to_transform();
    let inv = invert(&fwd);
    for i in 0..100 {
        let p = Vec3::new(
            i as f64 * 0.7 - 30.0,
            (i * i) as f64 * 0.01,
            -(i as f64) * 0.3,
        );
        assert!(max_diff(inv.apply(p), back.apply(p)) < 1e-9);
        assert!(max_diff(inv.apply(fwd.apply(p)), p) < 1e-9);
    }
}

#[test]
fn sense_sign_law_on_degree_grid() {
    for axis in PrincipalAxis::ALL {
        for d in -180..=180 {
            let a = AngleDeg::new(d as f64).unwrap();
            let cw = axis_rotation_matrix(axis, RotationSense::Cw, a);
            let ccw = axis_rotation_matrix(axis, RotationSense::Ccw, -a);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((cw[i][j] - ccw[i][j]).abs() < 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rotation_matrices_are_proper(axis in axis_strategy(), sense in sense_strategy(), deg in -180.0f64..=180.0) {
        let r = axis_rotation_matrix(axis, sense, AngleDeg::new(deg).unwrap());
        prop_assert!(orthonormality_error(&r) < 1e-9);
        prop_assert!((determinant(&r) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pivot_is_fixed(spec in spec_strategy()) {
        let out = rotate_about_pivot(&[spec.pivot], &spec).unwrap();
        prop_assert!(max_diff(out[0], spec.pivot) < 1e-12);
    }

    #[test]
    fn rotation_is_an_isometry(spec in spec_strategy(), pts in prop::collection::vec(vec_strategy(100.0), 2..8)) {
        let out = rotate_about_pivot(&pts, &spec).unwrap();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let before = pts[i].distance(pts[j]);
                let after = out[i].distance(out[j]);
                prop_assert!((before - after).abs() <= 1e-9 * before.max(1.0));
            }
        }
    }

    #[test]
    fn matches_homogeneous_oracle(spec in spec_strategy(), p in vec_strategy(100.0)) {
        let ours = rotate_about_pivot(&[p], &spec).unwrap()[0];
        let theirs = oracle::rotate(
            p.to_array(),
            spec.axis.index(),
            spec.sense == RotationSense::Ccw,
            spec.angle.degrees(),
            spec.pivot.to_array(),
        );
        prop_assert!(max_diff(ours, Vec3::from(theirs)) < 1e-9);
    }

    #[test]
    fn same_axis_angles_add(
        axis in axis_strategy(),
        a in -90.0f64..=90.0,
        b in -90.0f64..=90.0,
        pivot in vec_strategy(20.0),
        p in vec_strategy(50.0),
    ) {
        let spec = |d: f64| RotationSpec::new(axis, RotationSense::Ccw, AngleDeg::new(d).unwrap(), pivot).unwrap();
        let stepwise = rotate_about_pivot(&rotate_about_pivot(&[p], &spec(a)).unwrap(), &spec(b)).unwrap();
        let once = rotate_about_pivot(&[p], &spec(a + b)).unwrap();
        prop_assert!(max_diff(stepwise[0], once[0]) < 1e-9);
    }

    #[test]
    fn translations_compose(pts in prop::collection::vec(vec_strategy(100.0), 0..6), u in vec_strategy(10.0), v in vec_strategy(10.0)) {
        let twice = translate(&translate(&pts, u).unwrap(), v).unwrap();
        let once = translate(&pts, u + v).unwrap();
        for (a, b) in twice.iter().zip(&once) {
            prop_assert!(max_diff(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn compose_applies_right_then_left(s1 in spec_strategy(), s2 in spec_strategy(), p in vec_strategy(50.0)) {
        let a = s1.to_transform();
        let b = s2.to_transform();
        prop_assert!(max_diff(compose(&a, &b).apply(p), a.apply(b.apply(p))) < 1e-9);
        let id = compose(&a, &invert(&a));
        prop_assert!(id.is_identity(1e-9));
        prop_assert!(RigidTransform::new(*compose(&a, &b).rotation(), Vec3::ZERO).is_ok());
    }
}
