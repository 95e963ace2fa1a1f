//! Point-pair sampling pattern for the steered binary descriptor.
//!
//! 256 pairs `(x1, y1, x2, y2)` drawn from an isotropic Gaussian (sigma = 31/5 px)
//! and clipped to a 13 px radius so that any rotation plus the 5x5 smoothing box
//! stays inside a 15 px patch. Generated once with a fixed seed; do not edit.

pub(crate) const ORB_PATTERN: [[i8; 4]; 256] = [
    [-7, 5, 0, 3],
    [2, 3, 5, -10],
    [-1, 6, -4, -6],
    [-3, -2, 2, -5],
    [6, 8, -1, -1],
    [8, 6, 6, 0],
    [-4, 6, 3, 0],
    [-4, -1, -6, 0],
    [9, 9, -2, 11],
    [-2, 6, -2, -6],
    [8, 5, 4, -2],
    [-5, 11, 3, 4],
    [-1, 11, 10, 5],
    [3, 1, -4, -3],
    [-9, -9, -11, 5],
    [-3, -2, -1, -4],
    [5, -6, 4, 0],
    [-9, -4, -3, 1],
    [5, -2, -1, -3],
    [-3, 4, -1, 1],
    [-6, -9, 1, 3],
    [-1, 4, -6, -4],
    [8, -5, -6, 1],
    [10, 4, -7, 9],
    [-1, 7, -3, 1],
    [2, -8, -9, 3],
    [4, -8, -9, 0],
    [-2, 6, 7, -6],
    [-3, 8, 2, 7],
    [0, -4, -1, -5],
    [-8, 2, -7, -5],
    [-1, -12, 0, -6],
    [-3, -3, 9, -1],
    [-3, 4, -6, -10],
    [-4, 4, -6, 2],
    [3, -1, -5, 8],
    [-12, -4, 4, 9],
    [1, 10, 2, -11],
    [-7, 9, -5, -1],
    [-3, -5, -3, -1],
    [-5, -9, 0, 8],
    [2, 6, 2, -4],
    [-9, -9, -8, 6],
    [-6, -11, 9, 4],
    [7, -1, 5, 5],
    [-10, 7, 6, -6],
    [0, 2, -1, 3],
    [-8, 1, 3, -6],
    [0, 2, 6, 0],
    [1, -2, -5, 5],
    [2, -3, -4, -10],
    [4, -3, 4, -5],
    [-5, 0, 3, -11],
    [7, 1, -7, -6],
    [-2, 5, 4, 7],
    [-7, 3, -8, 1],
    [1, 0, 4, -5],
    [-1, 8, 3, 3],
    [-3, -5, 1, 0],
    [-2, 6, -6, -3],
    [-3, 7, 1, -9],
    [-5, 3, 3, -4],
    [-1, -3, -4, -5],
    [-4, -5, -7, 0],
    [5, -3, -5, 0],
    [10, -7, 1, 6],
    [6, 3, -7, -5],
    [8, -10, 2, 7],
    [-5, 11, 4, -1],
    [1, -6, -1, 7],
    [7, 5, 7, 6],
    [9, 0, -7, 1],
    [-4, 7, -8, -6],
    [4, -10, 3, -1],
    [-6, -1, 0, 5],
    [-9, -1, -12, -1],
    [-2, 1, 6, -10],
    [-4, 0, 5, 1],
    [3, 3, -6, 2],
    [9, 4, -3, 8],
    [-7, -9, -4, 1],
    [3, 4, 11, 4],
    [-2, 1, 1, -4],
    [5, -6, 3, -6],
    [-1, 9, 3, 10],
    [-9, 8, -1, -5],
    [-7, -2, -10, -3],
    [3, 1, 1, 6],
    [-1, 1, 9, 3],
    [1, 4, 0, -5],
    [4, -10, 5, 7],
    [5, 5, 9, -1],
    [-5, 3, -6, -6],
    [-1, 1, -4, -3],
    [-5, -2, -3, -3],
    [-3, -8, 10, -2],
    [1, 2, -7, -7],
    [-7, 1, 5, 8],
    [-5, 7, -10, -3],
    [-4, 2, 3, -4],
    [8, 3, -2, -12],
    [-3, -1, 0, -6],
    [0, 4, -2, 3],
    [-4, -4, -5, -7],
    [8, -2, -1, 4],
    [-4, 2, -1, 3],
    [1, -8, -1, 3],
    [6, -6, -5, -1],
    [1, 4, -6, 4],
    [8, 8, 5, 11],
    [1, 2, -8, -7],
    [-7, 3, 7, 4],
    [-4, -6, -3, -1],
    [-11, -5, -3, 8],
    [-3, 0, 3, -5],
    [-3, 2, -5, -4],
    [3, 1, 1, -2],
    [-7, 4, -8, 8],
    [-1, -4, -3, -7],
    [-6, 7, 11, 3],
    [-1, -1, 5, -5],
    [0, 1, -4, -8],
    [0, 12, -12, -2],
    [10, -4, 2, 4],
    [10, 4, -2, 5],
    [4, -4, 9, -7],
    [3, -9, 11, -1],
    [-4, 4, -4, -3],
    [3, 0, -3, 5],
    [-6, -8, 4, -12],
    [0, -2, -1, -10],
    [-4, 2, -3, 0],
    [0, 2, -10, -3],
    [1, -1, 8, 5],
    [4, -6, 1, -10],
    [9, 5, -1, -1],
    [-5, 9, -2, 1],
    [-4, 7, -7, -10],
    [-3, 0, 11, 2],
    [-8, 5, 8, -6],
    [10, 4, -2, -8],
    [-7, 8, 1, -5],
    [9, 1, -10, 4],
    [0, -2, 2, 1],
    [-6, 4, -1, 3],
    [4, 0, -1, -1],
    [-2, 2, -5, 2],
    [-3, -2, -1, 0],
    [-4, 6, -4, -2],
    [4, -9, 2, 8],
    [0, 4, -1, 3],
    [-3, 11, -6, -2],
    [-9, 2, -3, -8],
    [-2, -6, 3, -9],
    [4, 9, 3, -2],
    [6, -4, 4, 7],
    [0, 2, -3, 8],
    [-8, 4, -1, 4],
    [7, 3, -5, -3],
    [6, -4, 1, 4],
    [-3, -1, -2, -9],
    [-5, -7, 0, -2],
    [7, -7, -2, 0],
    [-6, 2, 2, 0],
    [-7, 0, 0, 9],
    [-6, -4, 1, -1],
    [1, 11, 8, -7],
    [9, 4, 5, -5],
    [-4, -12, -8, 0],
    [9, 3, 1, -10],
    [2, -3, 7, -8],
    [-5, -5, 1, 3],
    [0, -4, 2, 1],
    [7, 10, -1, 8],
    [-2, -6, -3, -10],
    [7, 1, -4, 5],
    [-12, -3, -7, 7],
    [5, 2, -7, -6],
    [-1, -5, 1, -1],
    [-8, -10, 0, 2],
    [0, 10, 5, 2],
    [-3, -2, 10, -6],
    [-4, -1, -6, 2],
    [2, 1, -2, -4],
    [7, -5, -3, -4],
    [7, 1, 3, -5],
    [4, 4, 4, 0],
    [-8, 0, -4, 3],
    [3, 3, -7, 3],
    [-6, -8, 7, 0],
    [-10, -1, -4, 4],
    [7, 0, 6, -1],
    [-2, -7, 3, 4],
    [7, -2, 1, -1],
    [-7, -8, -11, 4],
    [4, -7, -4, -1],
    [-7, -2, -4, 2],
    [-3, -2, -4, 3],
    [-4, 12, 2, -8],
    [4, -3, 1, 10],
    [3, 0, 8, 1],
    [-8, -8, 8, -7],
    [-1, 0, 0, 0],
    [1, 9, -3, 11],
    [-5, 3, 5, 5],
    [-5, 5, -3, 12],
    [-2, 6, 8, -7],
    [2, -6, 1, -2],
    [0, -10, 9, 1],
    [7, -5, -6, -4],
    [-5, -3, 4, 3],
    [-6, 0, -4, -1],
    [-2, 1, 1, 4],
    [7, -3, -4, 0],
    [-1, 9, -6, -1],
    [-5, 0, -4, 2],
    [6, 1, -9, -4],
    [8, -7, 6, 2],
    [-8, -3, -5, -1],
    [-2, -5, 5, 2],
    [-4, -2, 10, 3],
    [-5, -4, 9, 3],
    [11, -1, 5, 10],
    [-9, -6, -8, 3],
    [1, -1, 5, -3],
    [9, 4, -2, -9],
    [6, 1, -3, -2],
    [-4, -5, -1, 6],
    [2, -5, -4, -5],
    [3, -2, -8, 10],
    [-1, -1, 1, 2],
    [-3, 2, 4, -7],
    [0, -3, -8, -6],
    [-1, 0, 4, -4],
    [6, -1, 3, -11],
    [7, -1, -3, 9],
    [0, 3, -9, -7],
    [4, -12, -2, 5],
    [-12, 3, 7, 6],
    [-5, 3, -7, 6],
    [5, 5, -3, -3],
    [1, 2, -6, 10],
    [-2, 6, 8, 5],
    [-8, 7, 8, -5],
    [3, -1, 4, -4],
    [3, 5, -2, 7],
    [2, -1, -2, -11],
    [1, -6, -4, -1],
    [5, -6, 7, 6],
    [1, 7, 0, 4],
    [7, -3, -1, -10],
    [-2, -2, 7, 3],
    [-8, 1, 5, 0],
    [12, -4, -9, -9],
    [7, 9, -2, 4],
    [1, 0, 10, -4],
];
