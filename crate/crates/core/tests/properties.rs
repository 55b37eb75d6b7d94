use airy_core::closed_form::{full_solution, linear_solution};
use airy_core::dynamics::vf_x_sigma;
use airy_core::invariants::{grad_K, K_values};
use airy_core::poisson::{AuxChoice, P_f_matrix, Q_g_matrix};
use airy_core::series::SeriesState;
use airy_core::state::{LinearState, SigmaState, State5, SymState3};
use proptest::prelude::*;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn coord() -> impl Strategy<Value = f64> {
    -3.0f64..3.0
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]
}

fn state() -> impl Strategy<Value = State5> {
    (coord(), curvature(), coord(), coord(), coord()).prop_map(|(a, g, z, w, b)| State5::new(a, g, z, w, b))
}

/// `γ < 0` with a wet interval, so the solution exists for all `t ≥ 0`.
fn physical() -> impl Strategy<Value = State5> {
    (coord(), -3.0f64..-0.1, 0.1f64..3.0, coord(), coord())
        .prop_map(|(a, g, depth, w, b)| State5::new(a, g, depth + w * w / (4.0 * g), w, b))
}

fn translate(s: &State5, c: f64) -> State5 {
    State5::new(
        s.alpha,
        s.gamma,
        s.zeta + s.omega * c + s.gamma * c * c,
        s.omega + 2.0 * s.gamma * c,
        s.beta + s.alpha * c,
    )
}

proptest! {
    #[test]
    fn sigma_chart_round_trip(s in state()) {
        let back = State5::from_sigma(&s.to_sigma().unwrap()).unwrap();
        prop_assert!(close(&back.to_array(), &s.to_array(), 1e-12));
    }

    #[test]
    fn vertex_chart_round_trip(s in state()) {
        let back = State5::from_vertex(&s.to_vertex().unwrap()).unwrap();
        prop_assert!(close(&back.to_array(), &s.to_array(), 1e-12));
    }

    #[test]
    fn k_values_are_translation_invariant(s in state(), c in -2.0f64..2.0) {
        let a = K_values(&s).unwrap();
        let b = K_values(&translate(&s, c)).unwrap();
        prop_assert!(close(&[a.k0, a.k1, a.k2], &[b.k0, b.k1, b.k2], 1e-11));
    }

    #[test]
    fn support_endpoints_are_dry(s in physical()) {
        let sup = s.support_interval().unwrap();
        let scale = 1f64.max(s.zeta.abs()).max(s.omega.abs() * sup.width()).max(s.gamma.abs() * sup.width().powi(2));
        for x in [sup.x_minus, sup.x_plus] {
            prop_assert!(s.eval_fields(x).0.abs() <= 1e-12 * scale);
        }
        prop_assert!(s.eval_fields(sup.center()).0 > 0.0);
    }

    #[test]
    fn tensors_are_antisymmetric_and_generate_x(
        a in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0],
        sg in prop_oneof![-3.0f64..-0.05, 0.05f64..3.0],
        k in coord(), w in coord(), d in coord(),
    ) {
        let s = SigmaState::new(a, sg, k, w, d);
        prop_assume!((a * a - 4.0 * sg.powi(3)).abs() > 1e-3);
        let p = P_f_matrix(&s, &AuxChoice::Exact).unwrap();
        let q = Q_g_matrix(&s, &AuxChoice::Exact).unwrap();
        prop_assert!((p + p.transpose()).amax() == 0.0);
        prop_assert!((q + q.transpose()).amax() == 0.0);
        let [_, dk1, dk2] = grad_K(&s).unwrap();
        let x = vf_x_sigma(&s);
        let px = p * nalgebra::SVector::<f64, 5>::from(dk2);
        let qx = q * nalgebra::SVector::<f64, 5>::from(dk1);
        prop_assert!(close(px.as_slice(), &x, 1e-10));
        prop_assert!(close(qx.as_slice(), &x, 1e-10));
    }

    #[test]
    fn closed_form_is_a_flow(s in physical(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let direct = full_solution(t1 + t2, &s).unwrap();
        let mid = full_solution(t1, &s).unwrap();
        let two_step = full_solution(t2, &mid).unwrap();
        prop_assert!(close(&direct.to_array(), &two_step.to_array(), 1e-8));
    }

    #[test]
    fn linear_closed_form_is_a_flow(
        a in 0.0f64..2.0, z in coord(), w in coord(), b in coord(),
        t1 in 0.0f64..2.0, t2 in 0.0f64..2.0,
    ) {
        let s = LinearState::new(a, z, w, b);
        let direct = linear_solution(t1 + t2, &s).unwrap();
        let two_step = linear_solution(t2, &linear_solution(t1, &s).unwrap()).unwrap();
        prop_assert!(close(&direct.to_array(), &two_step.to_array(), 1e-12));
    }

    #[test]
    fn parabolic_series_evaluates_like_the_state(a in coord(), g in curvature(), z in coord(), x in coord(), n in 1usize..5) {
        let p = SymState3 { alpha: a, gamma: g, zeta: z };
        let series = SeriesState::from_parabolic(&p, n).unwrap();
        let (e1, u1) = series.eval(x);
        let (e2, u2) = p.embed().eval_fields(x);
        prop_assert!(close(&[e1, u1], &[e2, u2], 1e-14));
    }
}
