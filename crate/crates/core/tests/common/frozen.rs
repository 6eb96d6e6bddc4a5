//! MicroGrid values from a brute-force enumeration written apart from this
//! crate: plain probability space at β = 4, arbitrary precision at β = 200.

use coopsig::agents::arsa::{arsa_receiver_policy, arsa_signal_utility, arsa_signaler_policy};
use coopsig::agents::iw::{iw_goal_posterior, iw_receiver_action_dist, iw_signal_utility, iw_signaler_policy};
use coopsig::agents::ju::{ju_receiver_policy, ju_signaler_policy};
use coopsig::agents::TurnAction;
use coopsig::grid::Feature;
use coopsig::pragmatics::{rsa_listener, rsa_speaker};

use super::*;

/// (level, signal, P(A), P(B), P(C))
pub const RSA_LISTENER: [(u8, Feature, [f64; 3]); 3] = [
    (1, RED, [0.5, 0.5, 0.0]),
    (2, RED, [1.1257331891357572e-07, 0.9999998874266811, 0.0]),
    (1, CIRCLE, [0.9999998874270992, 0.0, 1.1257290072363002e-07]),
];

/// (level, goal, P(red), P(circle))
pub const RSA_SPEAKER: [(u8, usize, f64, f64); 2] = [
    (1, A, 0.0003353501304664781, 0.9996646498695335),
    (2, A, 3.775148143452162e-11, 0.9999999999622485),
];

pub const IW_POSTERIOR: [(u8, Feature, [f64; 3]); 6] = [
    (0, RED, [0.9999998874648379, 1.12535162055095e-07, 0.0]),
    (0, CIRCLE, [0.6666666416546564, 0.0, 0.3333333583453436]),
    (1, RED, [0.9999999999999873, 1.2698549723310237e-14, 0.0]),
    (1, CIRCLE, [0.9999883453565807, 0.0, 1.1654643419289699e-05]),
    (2, RED, [0.9999999999999747, 2.539172684957009e-14, 0.0]),
    (2, CIRCLE, [0.9999999999999873, 0.0, 1.267125381695134e-14]),
];

/// Level-0 receiver mixture for "red": GoTo A, B, C, Pass.
pub const IW_MIXTURE_RED: [f64; 4] = [
    0.9999998874270866,
    1.124973980624815e-07,
    2.532407846987524e-14,
    7.549001397924607e-11,
];

/// (speaker level, goal, signal, IW utility, aRSA utility)
pub const SIGNAL_UTILITY: [(u8, usize, Feature, f64, f64); 12] = [
    (1, A, RED, 5.999998649578081, 0.0),
    (1, A, CIRCLE, 3.33333313311138, 2.0),
    (1, B, RED, -1.9999995498594276, 0.0),
    (1, B, TRIANGLE, 1.9993283999106854, 2.0),
    (1, C, GREEN, 5.99999999977339, 6.0),
    (1, C, CIRCLE, 0.6666668667376152, 2.0),
    (2, A, RED, 5.999999999773238, 0.0),
    (2, A, CIRCLE, 5.999906762626039, 5.999999099416794),
    (2, B, RED, -1.9999999999244467, 0.0),
    (2, B, TRIANGLE, 1.9993283999106854, 2.0),
    (2, C, GREEN, 5.99999999977339, 6.0),
    (2, C, CIRCLE, -1.999906762777045, -1.999999099416794),
];

/// Signaler modes at β = 200 for goals A, B, C (same at levels 1 and 2).
pub const IW_SIGNALER_MODES: [TurnAction; 3] = [TurnAction::Send(RED), TurnAction::GoTo(B), TurnAction::Send(GREEN)];
pub const ARSA_SIGNALER_MODES: [TurnAction; 3] =
    [TurnAction::Send(CIRCLE), TurnAction::GoTo(B), TurnAction::Send(GREEN)];

/// Every deviation from the frozen values beyond `tol`, as readable lines.
pub fn mismatches(tol: f64) -> Vec<String> {
    let s = micro(A);
    let b = beta(4.0);
    let mut bad = Vec::new();
    let mut check = |what: String, got: f64, want: f64| {
        if !close(got, want, tol) {
            bad.push(format!("{what}: got {got}, want {want}"));
        }
    };
    for (level, f, want) in RSA_LISTENER {
        let l = rsa_listener(&s, level, f, b).unwrap();
        for (g, w) in want.into_iter().enumerate() {
            check(format!("L{level}({g}|{f})"), l.get(g), w);
        }
    }
    for (level, goal, red, circle) in RSA_SPEAKER {
        let sp = rsa_speaker(&s, level, goal, b).unwrap();
        check(format!("S{level}(red|{goal})"), sp.get(RED), red);
        check(format!("S{level}(circle|{goal})"), sp.get(CIRCLE), circle);
    }
    for (level, f, want) in IW_POSTERIOR {
        let post = iw_goal_posterior(&s, f, level, b).unwrap();
        for (g, w) in want.into_iter().enumerate() {
            check(format!("IW P{level}({g}|{f})"), post.get(g), w);
        }
    }
    let mix = iw_receiver_action_dist(&s, RED, 0, b).unwrap();
    let acts = [
        TurnAction::GoTo(A),
        TurnAction::GoTo(B),
        TurnAction::GoTo(C),
        TurnAction::Pass,
    ];
    for (a, want) in acts.into_iter().zip(IW_MIXTURE_RED) {
        check(format!("IW receiver {a} | red"), mix.prob(a), want);
    }
    for (level, goal, f, iw, arsa) in SIGNAL_UTILITY {
        check(
            format!("IW U{level}({f},{goal})"),
            iw_signal_utility(&s, f, goal, level, b).unwrap(),
            iw,
        );
        check(
            format!("aRSA U{level}({f},{goal})"),
            arsa_signal_utility(&s, f, goal, level, b).unwrap(),
            arsa,
        );
    }

    let sharp = blunt();
    let mut modes = Vec::new();
    for level in 1..=2 {
        for goal in [A, B, C] {
            modes.push((
                format!("IW S{level} goal {goal}"),
                iw_signaler_policy(&s, goal, level, sharp).unwrap().mode(),
                IW_SIGNALER_MODES[goal],
            ));
            modes.push((
                format!("aRSA S{level} goal {goal}"),
                arsa_signaler_policy(&s, goal, level, sharp).unwrap().mode(),
                ARSA_SIGNALER_MODES[goal],
            ));
        }
    }
    for level in 0..=2 {
        for (f, item) in [(RED, A), (CIRCLE, A), (GREEN, C), (TRIANGLE, B)] {
            modes.push((
                format!("IW R{level} {f}"),
                iw_receiver_action_dist(&s, f, level, sharp).unwrap().mode(),
                TurnAction::GoTo(item),
            ));
        }
        for (f, item) in [(CIRCLE, A), (GREEN, C), (TRIANGLE, B)] {
            modes.push((
                format!("aRSA R{level} {f}"),
                arsa_receiver_policy(&s, f, level, sharp).unwrap().mode(),
                TurnAction::GoTo(item),
            ));
        }
    }
    modes.push((
        "aRSA R2 red".into(),
        arsa_receiver_policy(&s, RED, 2, sharp).unwrap().mode(),
        TurnAction::GoTo(B),
    ));
    modes.push((
        "JU S goal A".into(),
        ju_signaler_policy(&s, A, sharp).unwrap().mode(),
        TurnAction::Send(RED),
    ));
    modes.push((
        "JU S goal B".into(),
        ju_signaler_policy(&s, B, sharp).unwrap().mode(),
        TurnAction::GoTo(B),
    ));
    modes.push((
        "JU R red".into(),
        ju_receiver_policy(&s, RED, sharp).unwrap().mode(),
        TurnAction::GoTo(A),
    ));
    for (what, got, want) in modes {
        if got != want {
            bad.push(format!("{what}: mode {got}, want {want}"));
        }
    }
    bad
}
