use bagtrack_core::{
    build_candidate_subspace, extract_patch, principal_angles, Frame, HistoryBuffer, ParticleState,
    PatchGeometry,
};
use bagtrack_oracles as oracle;
use proptest::prelude::*;

fn checkerboard(w: usize, h: usize, cell: usize) -> Frame {
    let px = (0..w * h)
        .map(|i| if ((i % w) / cell + (i / w) / cell) % 2 == 0 { 0.8 } else { 0.2 })
        .collect();
    Frame::new(w, h, px).unwrap()
}

#[test]
fn checkerboard_crop_matches_reference_resampler() {
    let frame = checkerboard(8, 8, 1);
    let geom = PatchGeometry { base_w: 4.0, base_h: 4.0, h1: 2, h2: 2 };
    for (x, y) in [(0, 0), (1, 2), (4, 4), (3, 0)] {
        let got = extract_patch(&frame, &ParticleState::new(x as f64, y as f64, 1.0), &geom).unwrap();
        let want = oracle::bilinear_reference(frame.pixels(), 8, (x, y, 4, 4), 2, 2);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "at ({x},{y}): {got:?} vs {want:?}");
        }
    }
}

#[test]
fn upsampled_crop_matches_reference_resampler() {
    let px: Vec<f64> = (0..30 * 20).map(|i| ((i * 37) % 101) as f64 / 100.0).collect();
    let frame = Frame::new(30, 20, px).unwrap();
    let geom = PatchGeometry { base_w: 7.0, base_h: 5.0, h1: 11, h2: 13 };
    let got = extract_patch(&frame, &ParticleState::new(6.0, 9.0, 1.0), &geom).unwrap();
    let want = oracle::bilinear_reference(frame.pixels(), 30, (6, 9, 7, 5), 13, 11);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Reordering the history changes neither the origin nor the span.
    #[test]
    fn subspace_ignores_history_order(
        cols in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 24), 4),
        cand in prop::collection::vec(0.0f64..=1.0, 24),
    ) {
        let mut a = HistoryBuffer::new(4, 24);
        let mut b = HistoryBuffer::new(4, 24);
        for c in &cols { a.push(c.clone()).unwrap(); }
        for c in cols.iter().rev() { b.push(c.clone()).unwrap(); }
        let sa = build_candidate_subspace(&cand, &a, 3, false).unwrap();
        let sb = build_candidate_subspace(&cand, &b, 3, false).unwrap();
        for (x, y) in sa.mu.iter().zip(&sb.mu) {
            prop_assert!((x - y).abs() < 1e-14);
        }
        // Random data has a clear gap between the third and fourth singular values.
        let angles = principal_angles(&sa.basis, &sb.basis).unwrap();
        prop_assert!(angles.iter().all(|t| t.abs() < 1e-6), "{:?}", angles);
    }

    #[test]
    fn subspace_origin_is_window_mean(
        cols in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 10), 3),
        cand in prop::collection::vec(0.0f64..=1.0, 10),
    ) {
        let mut h = HistoryBuffer::new(3, 10);
        for c in &cols { h.push(c.clone()).unwrap(); }
        let s = build_candidate_subspace(&cand, &h, 2, false).unwrap();
        for i in 0..10 {
            let want = (cand[i] + cols.iter().map(|c| c[i]).sum::<f64>()) / 4.0;
            prop_assert!((s.mu[i] - want).abs() < 1e-14);
        }
    }
}
