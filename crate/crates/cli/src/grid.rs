//! Parsing of grid and list arguments.

use hetlab::Order;

use crate::error::{CliError, CliResult};

const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `start:stop:step` or a comma separated list of numbers.
///
/// Range points are `start + i * step` for `i = 0, 1, ...` while they do not
/// exceed `stop` (up to a relative slack of 1e-9 steps), cleaned to 15
/// significant digits so that `0.1:0.3:0.1` yields exactly `0.1, 0.2, 0.3`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::usage("empty grid"));
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(CliError::usage(format!("grid {spec:?} must be start:stop:step")));
        };
        let (start, stop, step) = (parse_number(start)?, parse_number(stop)?, parse_number(step)?);
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::usage(format!("grid {spec:?} has non-finite bounds")));
        }
        if step <= 0.0 || stop < start {
            return Err(CliError::usage(format!(
                "grid {spec:?} needs step > 0 and stop >= start"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() + 1.0;
        if count > MAX_GRID_POINTS as f64 {
            return Err(CliError::usage(format!("grid {spec:?} has more than {MAX_GRID_POINTS} points")));
        }
        Ok((0..count as usize)
            .map(|i| clean(start + i as f64 * step))
            .collect())
    } else {
        spec.split(',').map(parse_number).collect()
    }
}

pub fn parse_orders(spec: &str) -> CliResult<Vec<Order>> {
    parse_grid(spec)?
        .into_iter()
        .map(|q| Order::new(q).map_err(|e| CliError::usage(e.to_string())))
        .collect()
}

fn parse_number(s: &str) -> CliResult<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => t
            .parse::<f64>()
            .ok()
            .filter(|x| !x.is_nan())
            .ok_or_else(|| CliError::usage(format!("cannot parse number {s:?}"))),
    }
}

fn clean(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("scientific format parses")
}
