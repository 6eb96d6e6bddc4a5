#![allow(dead_code)]

pub mod frozen;

use coopsig::grid::{BarrierCondition, Cell, Color, Feature, GridSpec, Item, Shape, Trial};
use coopsig::planning::{Beta, Scene};

pub const RED: Feature = Feature::Color(Color::Red);
pub const GREEN: Feature = Feature::Color(Color::Green);
pub const PURPLE: Feature = Feature::Color(Color::Purple);
pub const CIRCLE: Feature = Feature::Shape(Shape::Circle);
pub const TRIANGLE: Feature = Feature::Shape(Shape::Triangle);
pub const SQUARE: Feature = Feature::Shape(Shape::Square);

pub const A: usize = 0;
pub const B: usize = 1;
pub const C: usize = 2;

pub fn beta(b: f64) -> Beta {
    Beta::new(b).unwrap()
}

/// Stands in for β → ∞ when reading policy modes.
pub fn blunt() -> Beta {
    beta(200.0)
}

/// 5×5 open grid; signaler (4,2), receiver (0,2).
/// A=(red,circle)@(0,0): d_s 6, d_r 2. B=(red,triangle)@(4,4): d_s 2, d_r 6.
/// C=(green,circle)@(2,2): 2 and 2.
pub fn micro_trial(target: usize) -> Trial {
    let grid = GridSpec::new(5, 5, [], Cell::new(4, 2), Cell::new(0, 2), BarrierCondition::Custom).unwrap();
    let items = vec![
        Item {
            id: A,
            row: 0,
            col: 0,
            shape: Shape::Circle,
            color: Color::Red,
        },
        Item {
            id: B,
            row: 4,
            col: 4,
            shape: Shape::Triangle,
            color: Color::Red,
        },
        Item {
            id: C,
            row: 2,
            col: 2,
            shape: Shape::Circle,
            color: Color::Green,
        },
    ];
    Trial::new(grid, items, target, 0).unwrap()
}

pub fn micro(target: usize) -> Scene {
    Scene::new(micro_trial(target)).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
