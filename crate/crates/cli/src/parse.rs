//! Value parsers for grid and list flags.

/// `start:stop:step` or a comma-separated list.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
            sdpi_core::figures::step_grid(num(start)?, num(stop)?, num(step)?)
                .map_err(|e| e.to_string())
        }
        [_] => list(s),
        _ => Err(format!(
            "'{s}' is neither start:stop:step nor a comma-separated list"
        )),
    }
}

pub fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("'{x}': {e}")))
        .collect()
}

/// `δ:ξ` pairs separated by commas.
pub fn pairs(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| format!("'{p}' is not of the form delta:xi"))?;
            let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid("0:0.5:0.25").unwrap(), vec![0.0, 0.25, 0.5]);
        assert_eq!(grid("0.1, 0.3").unwrap(), vec![0.1, 0.3]);
        assert!(grid("0:1").is_err());
        assert!(grid("a,b").is_err());
        assert!(grid("0:1:0").is_err());
    }

    #[test]
    fn lists_and_pairs() {
        assert_eq!(list::<usize>("5,5,5").unwrap(), vec![5, 5, 5]);
        assert!(list::<usize>("5,-1").is_err());
        assert_eq!(
            pairs("0.4:0.1,0.1:0.01").unwrap(),
            vec![(0.4, 0.1), (0.1, 0.01)]
        );
        assert!(pairs("0.4").is_err());
    }
}
