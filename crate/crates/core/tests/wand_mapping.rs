use proptest::prelude::*;

use wandsynth_core::mapping::{map_cutoff, map_pitch, map_reverb};
use wandsynth_core::wand::{apply_action, overlap_fraction};
use wandsynth_core::{map_scene, MapConfig, SceneState, Side, WandAction, WandConfig, WandState};

fn wand(side: Side) -> impl Strategy<Value = WandState> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, any::<bool>())
        .prop_map(move |(x, y, z, a)| WandState::at(side, x, y, z, a, &WandConfig::default()))
}

fn scene() -> impl Strategy<Value = SceneState> {
    (wand(Side::Left), wand(Side::Right)).prop_map(|(l, r)| SceneState::from_wands(l, r))
}

#[test]
fn centered_pair() {
    let c = WandConfig::default();
    let s = SceneState::from_wands(
        WandState::at(Side::Left, 0.5, 0.5, 0.5, true, &c),
        WandState::at(Side::Right, 0.5, 0.5, 0.5, true, &c),
    );
    let p = map_scene(&s, &MapConfig::default());
    for v in p.voices {
        assert!((v.freq - 440.0).abs() < 1e-9);
        assert!((v.amp - 0.55).abs() < 1e-12);
        assert!((v.cutoff - (200.0f64 * 6000.0).sqrt()).abs() < 1e-9);
        assert!((v.cutoff - 1095.4).abs() < 0.05);
        assert!((v.rt60 - 1.65).abs() < 1e-12);
    }
    // coincident spheres overlap fully
    assert_eq!(p.xmod, 1.0);
}

#[test]
fn both_inactive_is_mute() {
    let s = SceneState::new(&WandConfig::default());
    let p = map_scene(&s, &MapConfig::default());
    assert_eq!(p.voices[0].amp, 0.0);
    assert_eq!(p.voices[1].amp, 0.0);
    assert_eq!(p.xmod, 0.0);
}

#[test]
fn xmod_exponent_shapes_overlap() {
    let c = WandConfig::default();
    let s = SceneState::from_wands(
        WandState::at(Side::Left, 0.5, 0.5, 0.5, true, &c),
        WandState::at(Side::Right, 0.55, 0.5, 0.5, true, &c),
    );
    let cfg = MapConfig {
        xmod_exponent: 2.0,
        ..Default::default()
    };
    assert!((map_scene(&s, &cfg).xmod - s.overlap.powi(2)).abs() < 1e-12);
}

proptest! {
    #[test]
    fn params_within_bounds(s in scene()) {
        let cfg = MapConfig::default();
        let p = map_scene(&s, &cfg);
        for v in p.voices {
            prop_assert!((cfg.f_min..=cfg.f_max).contains(&v.freq));
            prop_assert!((cfg.c_min..=cfg.c_max).contains(&v.cutoff));
            prop_assert!((cfg.rt_min..=cfg.rt_max).contains(&v.rt60));
            prop_assert!((0.0..=1.0).contains(&v.amp));
        }
        prop_assert!((0.0..=1.0).contains(&p.xmod));
    }

    #[test]
    fn laws_match_closed_forms(s in scene()) {
        let p = map_scene(&s, &MapConfig::default());
        for w in [&s.left, &s.right] {
            let v = p.voice(w.side);
            prop_assert!((v.freq / (110.0 * 16f64.powf(w.y)) - 1.0).abs() < 1e-12);
            prop_assert!((v.cutoff / (200.0 * 30f64.powf(w.x)) - 1.0).abs() < 1e-12);
            prop_assert!((v.rt60 - (0.3 + (1.0 - w.z) * 2.7)).abs() < 1e-12);
            let amp = if w.active { 0.1 + 0.9 * w.z } else { 0.0 };
            prop_assert!((v.amp - amp).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_maps(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a < b);
        let cfg = MapConfig::default();
        prop_assert!(map_pitch(a, &cfg) < map_pitch(b, &cfg));
        prop_assert!(map_cutoff(a, &cfg) < map_cutoff(b, &cfg));
        prop_assert!(map_reverb(a, &cfg) > map_reverb(b, &cfg));
    }

    #[test]
    fn equal_steps_are_equal_intervals(y in 0.0f64..0.9, d in 0.0f64..0.1) {
        let cfg = MapConfig::default();
        let ratio = map_pitch(y + d, &cfg) / map_pitch(y, &cfg);
        prop_assert!((ratio - 16f64.powf(d)).abs() < 1e-9);
    }

    #[test]
    fn overlap_symmetric_and_bounded(l in wand(Side::Left), r in wand(Side::Right)) {
        let s = SceneState::from_wands(l, r);
        let c = WandConfig::default();
        let swapped = SceneState::from_wands(
            WandState::at(Side::Left, r.x, r.y, r.z, r.active, &c),
            WandState::at(Side::Right, l.x, l.y, l.z, l.active, &c),
        );
        prop_assert!((s.overlap - swapped.overlap).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&s.overlap));
        if !(l.active && r.active) {
            prop_assert_eq!(s.overlap, 0.0);
        }
        prop_assert_eq!(s.overlap, overlap_fraction(&s));
    }

    #[test]
    fn unclamped_moves_reverse(s in scene(), dx in -0.2f64..0.2, dy in -0.2f64..0.2, dz in -0.2f64..0.2, left in any::<bool>()) {
        let side = if left { Side::Left } else { Side::Right };
        let w = s.wand(side);
        let inside = |v: f64, d: f64| (0.0..=1.0).contains(&(v + d));
        prop_assume!(inside(w.x, dx) && inside(w.y, dy) && inside(w.z, dz));
        let c = WandConfig::default();
        let there = apply_action(&s, &WandAction::delta(side, dx, dy, dz), &c);
        let back = apply_action(&there, &WandAction::delta(side, -dx, -dy, -dz), &c);
        let (a, b) = (back.wand(side), s.wand(side));
        prop_assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12 && (a.z - b.z).abs() < 1e-12);
        prop_assert_eq!(back.wand(side.other()), s.wand(side.other()));
    }

    #[test]
    fn actions_keep_scene_in_unit_cube(s in scene(), dx in -2.0f64..2.0, dy in -2.0f64..2.0, dz in -2.0f64..2.0) {
        let c = WandConfig::default();
        let n = apply_action(&s, &WandAction::delta(Side::Right, dx, dy, dz), &c);
        for v in n.right.center() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(n.right.radius >= c.r_min && n.right.radius <= c.r_max);
    }
}
