//! Gridworld arena, feature-typed items and seeded trial generation.
//!
//! Items carry one shape and one color; either of them may be sent as a
//! signal, so [`Feature`] doubles as the signal vocabulary. Trials are a
//! pure function of `(grid, n_items, seed)`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streams;

pub const MIN_ITEMS: usize = 2;
pub const MAX_ITEMS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Triangle,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Purple,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Circle, Shape::Triangle, Shape::Square];
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Purple];
}

/// Which feature dimension a [`Feature`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Shape,
    Color,
}

/// A single item feature. Signals are limited to exactly one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    Color(Color),
    Shape(Shape),
}

impl Feature {
    /// The six features, colors first.
    pub const ALL: [Feature; 6] = [
        Feature::Color(Color::Red),
        Feature::Color(Color::Green),
        Feature::Color(Color::Purple),
        Feature::Shape(Shape::Circle),
        Feature::Shape(Shape::Triangle),
        Feature::Shape(Shape::Square),
    ];

    pub fn dimension(self) -> Dimension {
        match self {
            Feature::Color(_) => Dimension::Color,
            Feature::Shape(_) => Dimension::Shape,
        }
    }

    /// Position in [`Feature::ALL`].
    pub fn index(self) -> usize {
        match self {
            Feature::Color(Color::Red) => 0,
            Feature::Color(Color::Green) => 1,
            Feature::Color(Color::Purple) => 2,
            Feature::Shape(Shape::Circle) => 3,
            Feature::Shape(Shape::Triangle) => 4,
            Feature::Shape(Shape::Square) => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Color(Color::Red) => "red",
            Feature::Color(Color::Green) => "green",
            Feature::Color(Color::Purple) => "purple",
            Feature::Shape(Shape::Circle) => "circle",
            Feature::Shape(Shape::Triangle) => "triangle",
            Feature::Shape(Shape::Square) => "square",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown feature `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BarrierCondition {
    /// Barrier near the receiver.
    RB,
    /// Barrier shifted three rows toward the signaler.
    SB,
    Custom,
}

impl BarrierCondition {
    pub fn label(self) -> &'static str {
        match self {
            BarrierCondition::RB => "RB",
            BarrierCondition::SB => "SB",
            BarrierCondition::Custom => "Custom",
        }
    }
}

impl fmt::Display for BarrierCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BarrierCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rb" => Ok(BarrierCondition::RB),
            "sb" => Ok(BarrierCondition::SB),
            "custom" => Ok(BarrierCondition::Custom),
            _ => Err(Error::InvalidParam(format!("unknown barrier condition `{s}`"))),
        }
    }
}

/// The spatial arena. Construction validates bounds and connectivity, so a
/// `GridSpec` value always satisfies its invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    width: u32,
    height: u32,
    barrier: BTreeSet<Cell>,
    signaler_start: Cell,
    receiver_start: Cell,
    condition: BarrierCondition,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    width: u32,
    height: u32,
    condition: BarrierCondition,
    barrier: Vec<Cell>,
    signaler_start: Cell,
    receiver_start: Cell,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::new(
            raw.width,
            raw.height,
            raw.barrier,
            raw.signaler_start,
            raw.receiver_start,
            raw.condition,
        )
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid {
            width: g.width,
            height: g.height,
            condition: g.condition,
            barrier: g.barrier.into_iter().collect(),
            signaler_start: g.signaler_start,
            receiver_start: g.receiver_start,
        }
    }
}

impl GridSpec {
    pub fn new(
        width: u32,
        height: u32,
        barrier: impl IntoIterator<Item = Cell>,
        signaler_start: Cell,
        receiver_start: Cell,
        condition: BarrierCondition,
    ) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidGrid(format!("dimensions {width}x{height} below 2x2")));
        }
        let grid = GridSpec {
            width,
            height,
            barrier: barrier.into_iter().collect(),
            signaler_start,
            receiver_start,
            condition,
        };
        if let Some(c) = grid.barrier.iter().find(|c| !grid.in_bounds(**c)) {
            return Err(Error::InvalidGrid(format!("barrier cell {c} out of bounds")));
        }
        for (who, start) in [("signaler", signaler_start), ("receiver", receiver_start)] {
            if !grid.in_bounds(start) {
                return Err(Error::InvalidGrid(format!("{who} start {start} out of bounds")));
            }
            if grid.barrier.contains(&start) {
                return Err(Error::InvalidGrid(format!("{who} start {start} is a barrier cell")));
            }
        }
        if signaler_start == receiver_start {
            return Err(Error::InvalidGrid("agents share a start cell".into()));
        }
        for start in [signaler_start, receiver_start] {
            let seen = grid.flood_fill(start);
            let open = grid.cells().filter(|c| grid.is_open(*c)).count();
            if seen != open {
                return Err(Error::InvalidGrid(format!(
                    "{} open cells unreachable from {start}",
                    open - seen
                )));
            }
        }
        Ok(grid)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn barrier(&self) -> &BTreeSet<Cell> {
        &self.barrier
    }

    pub fn signaler_start(&self) -> Cell {
        self.signaler_start
    }

    pub fn receiver_start(&self) -> Cell {
        self.receiver_start
    }

    pub fn condition(&self) -> BarrierCondition {
        self.condition
    }

    pub fn n_cells(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.row < self.height && c.col < self.width
    }

    /// In bounds and not a barrier cell.
    pub fn is_open(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.barrier.contains(&c)
    }

    pub fn index(&self, c: Cell) -> usize {
        (c.row * self.width + c.col) as usize
    }

    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new(idx as u32 / self.width, idx as u32 % self.width)
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Cell::new(r, c)))
    }

    /// Open 4-neighbours of `c`.
    pub fn neighbors(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        let Cell { row, col } = c;
        [
            row.checked_sub(1).map(|r| Cell::new(r, col)),
            Some(Cell::new(row + 1, col)),
            col.checked_sub(1).map(|k| Cell::new(row, k)),
            Some(Cell::new(row, col + 1)),
        ]
        .into_iter()
        .flatten()
        .filter(move |n| self.is_open(*n))
    }

    /// Cells where an item may be placed: open and not a start cell.
    pub fn free_cells(&self) -> Vec<Cell> {
        self.cells()
            .filter(|c| self.is_open(*c) && *c != self.signaler_start && *c != self.receiver_start)
            .collect()
    }

    fn flood_fill(&self, start: Cell) -> usize {
        let mut seen = vec![false; self.n_cells()];
        let mut queue = VecDeque::from([start]);
        seen[self.index(start)] = true;
        let mut count = 1;
        while let Some(c) = queue.pop_front() {
            for n in self.neighbors(c) {
                let i = self.index(n);
                if !seen[i] {
                    seen[i] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count
    }
}

/// Canonical 10x10 arena. The signaler starts at the bottom, the receiver
/// at the top; the four-cell barrier sits two rows below the receiver (RB)
/// or three rows further toward the signaler (SB).
pub fn default_grid(condition: BarrierCondition) -> Result<GridSpec> {
    let row = match condition {
        BarrierCondition::RB => 2,
        BarrierCondition::SB => 5,
        BarrierCondition::Custom => return Err(Error::InvalidParam("no default grid for a custom barrier".into())),
    };
    GridSpec::new(
        10,
        10,
        (3..=6).map(|col| Cell::new(row, col)),
        Cell::new(9, 4),
        Cell::new(0, 4),
        condition,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    pub id: usize,
    pub row: u32,
    pub col: u32,
    pub shape: Shape,
    pub color: Color,
}

impl Item {
    pub fn cell(&self) -> Cell {
        Cell::new(self.row, self.col)
    }

    pub fn features(&self) -> [Feature; 2] {
        [Feature::Color(self.color), Feature::Shape(self.shape)]
    }

    pub fn has(&self, f: Feature) -> bool {
        match f {
            Feature::Color(c) => self.color == c,
            Feature::Shape(s) => self.shape == s,
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#{} {} {} @ {}",
            self.id,
            Feature::Color(self.color),
            Feature::Shape(self.shape),
            self.cell()
        )
    }
}

/// One task instance. The target is hidden from the receiver.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTrial", into = "RawTrial")]
pub struct Trial {
    grid: GridSpec,
    items: Vec<Item>,
    target_id: usize,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrial {
    grid: GridSpec,
    items: Vec<Item>,
    target_id: usize,
    seed: u64,
}

impl TryFrom<RawTrial> for Trial {
    type Error = Error;

    fn try_from(raw: RawTrial) -> Result<Self> {
        Trial::new(raw.grid, raw.items, raw.target_id, raw.seed)
    }
}

impl From<Trial> for RawTrial {
    fn from(t: Trial) -> Self {
        RawTrial {
            grid: t.grid,
            items: t.items,
            target_id: t.target_id,
            seed: t.seed,
        }
    }
}

impl Trial {
    pub fn new(grid: GridSpec, items: Vec<Item>, target_id: usize, seed: u64) -> Result<Self> {
        if !(MIN_ITEMS..=MAX_ITEMS).contains(&items.len()) {
            return Err(Error::BadArity(items.len()));
        }
        let mut cells = BTreeSet::new();
        let mut kinds = BTreeSet::new();
        for (i, item) in items.iter().enumerate() {
            if item.id != i {
                return Err(Error::InvalidTrial(format!("item at position {i} has id {}", item.id)));
            }
            let c = item.cell();
            if !grid.is_open(c) {
                return Err(Error::InvalidTrial(format!("item {i} on blocked cell {c}")));
            }
            if c == grid.signaler_start() || c == grid.receiver_start() {
                return Err(Error::InvalidTrial(format!("item {i} on a start cell")));
            }
            if !cells.insert(c) {
                return Err(Error::InvalidTrial(format!("two items share cell {c}")));
            }
            if !kinds.insert((item.shape, item.color)) {
                return Err(Error::InvalidTrial(format!("duplicate feature pair on item {i}")));
            }
        }
        if target_id >= items.len() {
            return Err(Error::InvalidTrial(format!("target id {target_id} out of range")));
        }
        Ok(Trial {
            grid,
            items,
            target_id,
            seed,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: usize) -> &Item {
        &self.items[id]
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn target_id(&self) -> usize {
        self.target_id
    }

    pub fn target(&self) -> &Item {
        &self.items[self.target_id]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same scene with a different hidden target.
    pub fn with_target(&self, target_id: usize) -> Result<Trial> {
        Trial::new(self.grid.clone(), self.items.clone(), target_id, self.seed)
    }
}

/// Draws a trial from the seeded stream for `seed`: distinct feature pairs
/// and distinct free cells, both without replacement, and a uniform target.
pub fn sample_trial(grid: &GridSpec, n_items: usize, seed: u64) -> Result<Trial> {
    if !(MIN_ITEMS..=MAX_ITEMS).contains(&n_items) {
        return Err(Error::BadArity(n_items));
    }
    let free = grid.free_cells();
    if free.len() < n_items {
        return Err(Error::InsufficientSpace {
            free: free.len(),
            requested: n_items,
        });
    }
    let mut rng = streams::trial_rng(seed);
    let kinds: Vec<(Shape, Color)> = Shape::ALL
        .iter()
        .flat_map(|s| Color::ALL.iter().map(move |c| (*s, *c)))
        .collect();
    let kind_idx = index::sample(&mut rng, kinds.len(), n_items);
    let cell_idx = index::sample(&mut rng, free.len(), n_items);
    let items = kind_idx
        .iter()
        .zip(cell_idx.iter())
        .enumerate()
        .map(|(id, (k, c))| {
            let (shape, color) = kinds[k];
            let cell = free[c];
            Item {
                id,
                row: cell.row,
                col: cell.col,
                shape,
                color,
            }
        })
        .collect();
    let target_id = rng.gen_range(0..n_items);
    Trial::new(grid.clone(), items, target_id, seed)
}

/// True iff each of the target's two features is shared with another item,
/// so every truthful signal about the target is ambiguous.
pub fn is_overloaded(trial: &Trial) -> bool {
    let target = trial.target();
    target
        .features()
        .iter()
        .all(|f| trial.items().iter().any(|it| it.id != target.id && it.has(*f)))
}

pub fn load_trials(json: &str) -> Result<Vec<Trial>> {
    Ok(serde_json::from_str(json)?)
}

pub fn save_trials(trials: &[Trial]) -> Result<String> {
    Ok(serde_json::to_string_pretty(trials)?)
}
