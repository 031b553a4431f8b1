use std::collections::{HashSet, VecDeque};

use super::dp::Corner;
use crate::error::{invalid, Result};
use crate::model::Cell;

fn step(cell: Cell, dr: isize, dc: isize) -> Option<Cell> {
    Some((
        cell.0.checked_add_signed(dr)?,
        cell.1.checked_add_signed(dc)?,
    ))
}

/// Whether `end` can be reached from every cell of `shape` using only the
/// two moves of `corner`, stepping through cells of `shape`.
pub fn sinks(shape: &[Cell], end: Cell, corner: Corner) -> Result<bool> {
    let set: HashSet<Cell> = shape.iter().copied().collect();
    if !set.contains(&end) {
        return invalid(format!("end cell {end:?} is not part of the shape"));
    }
    // Walk the moves backwards from `end`.
    let (dr, dc) = (corner.row_step(), corner.col_step());
    let mut reached = HashSet::from([end]);
    let mut queue = VecDeque::from([end]);
    while let Some(cell) = queue.pop_front() {
        for prev in [step(cell, -dr, 0), step(cell, 0, -dc)].into_iter().flatten() {
            if set.contains(&prev) && reached.insert(prev) {
                queue.push_back(prev);
            }
        }
    }
    Ok(reached.len() == set.len())
}

/// Whether some cell of `shape` sinks the whole shape for some corner, i.e.
/// whether a DP corner run can produce exactly this shape.
///
/// A shape that is not 4-connected can never be sunk and yields `false`.
pub fn is_dp_capturable(shape: &[Cell]) -> Result<bool> {
    if shape.is_empty() {
        return invalid("shape must be non-empty");
    }
    for corner in Corner::ALL {
        for &end in shape {
            if sinks(shape, end, corner)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
