//! Reference iteration counts and condition numbers, rows `L = 2..=6`,
//! columns [`NU_VALUES`].

use elasticity_core::fem::ElementPair;

pub const NU_VALUES: [f64; 5] = [0.25, 0.4, 0.49, 0.499, 0.4999];
pub const LEVELS: [u32; 5] = [2, 3, 4, 5, 6];

pub const P2P0_ITERATIONS: [[usize; 5]; 5] = [
    [4, 5, 6, 6, 6],
    [3, 4, 6, 7, 7],
    [3, 4, 6, 7, 7],
    [3, 4, 6, 7, 7],
    [3, 4, 5, 7, 7],
];

pub const P2P0_CONDITION: [[f64; 5]; 5] = [
    [1.15, 1.48, 2.52, 2.84, 2.88],
    [1.14, 1.44, 2.47, 2.98, 3.03],
    [1.13, 1.44, 2.55, 2.90, 2.94],
    [1.13, 1.44, 2.51, 2.86, 2.89],
    [1.13, 1.44, 2.45, 2.87, 2.91],
];

pub const P2P1_ITERATIONS: [[usize; 5]; 5] = [
    [4, 5, 5, 5, 5],
    [4, 6, 11, 12, 12],
    [4, 6, 12, 15, 15],
    [4, 6, 12, 15, 15],
    [4, 6, 11, 14, 15],
];

pub const P2P1_CONDITION: [[f64; 5]; 5] = [
    [1.20, 1.71, 4.31, 5.69, 5.89],
    [1.20, 1.71, 4.38, 5.81, 6.02],
    [1.19, 1.71, 4.38, 5.81, 6.02],
    [1.18, 1.71, 4.38, 5.81, 6.02],
    [1.17, 1.71, 4.38, 5.81, 6.02],
];

fn index(level: u32, nu: f64) -> Option<(usize, usize)> {
    let row = LEVELS.iter().position(|&l| l == level)?;
    let col = NU_VALUES.iter().position(|&v| v == nu)?;
    Some((row, col))
}

pub fn reference_iterations(pair: ElementPair, level: u32, nu: f64) -> Option<usize> {
    let (r, c) = index(level, nu)?;
    Some(match pair {
        ElementPair::P2P0 => P2P0_ITERATIONS[r][c],
        ElementPair::P2P1 => P2P1_ITERATIONS[r][c],
    })
}

pub fn reference_condition(pair: ElementPair, level: u32, nu: f64) -> Option<f64> {
    let (r, c) = index(level, nu)?;
    Some(match pair {
        ElementPair::P2P0 => P2P0_CONDITION[r][c],
        ElementPair::P2P1 => P2P1_CONDITION[r][c],
    })
}
