use std::path::Path;

use crate::{Error, Result};

/// A letter stroke as an ordered polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterPath {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

fn arc(cx: f64, cy: f64, r: f64, from_deg: f64, to_deg: f64, n: usize) -> Vec<[f64; 2]> {
    (0..=n)
        .map(|i| {
            let a = (from_deg + (to_deg - from_deg) * i as f64 / n as f64).to_radians();
            [cx + r * a.cos(), cy + r * a.sin()]
        })
        .collect()
}

impl LetterPath {
    pub fn new(label: impl Into<String>, points: Vec<[f64; 2]>) -> Result<Self> {
        let path = Self {
            label: label.into(),
            points,
        };
        path.validate()?;
        Ok(path)
    }

    fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::Precondition(format!(
                "letter `{}` needs at least 2 points",
                self.label
            )));
        }
        if self.points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::Precondition(format!("letter `{}` has non-finite points", self.label)));
        }
        if self.length() == 0.0 {
            return Err(Error::Degenerate(format!("letter `{}` has zero length", self.label)));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Schematic "U": down the left side, round the bottom, up the right side.
    pub fn builtin_u() -> Self {
        let mut pts = vec![[0.0, 1.0]];
        pts.extend(arc(0.5, 0.4, 0.5, 180.0, 360.0, 12));
        pts.push([1.0, 1.0]);
        Self::new("U", pts).expect("valid fixture")
    }

    /// Schematic "S": two opposed arcs drawn from the upper right.
    pub fn builtin_s() -> Self {
        let mut pts = arc(0.5, 0.75, 0.25, 20.0, 270.0, 10);
        pts.extend(arc(0.5, 0.25, 0.25, 90.0, -160.0, 10).into_iter().skip(1));
        Self::new("S", pts).expect("valid fixture")
    }

    /// `x y` per line; blank lines and `#` comments are skipped.
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| Error::Format(format!("letter line {}: expected `x y`", n + 1)))?;
            let [x, y] = nums[..] else {
                return Err(Error::Format(format!("letter line {}: expected `x y`", n + 1)));
            };
            points.push([x, y]);
        }
        Self::new(label, points)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(label, &text)
    }

    pub fn to_text(&self) -> String {
        self.points.iter().map(|p| format!("{} {}\n", p[0], p[1])).collect()
    }

    /// `ΔT + 1` points spaced uniformly in arc length.
    pub fn resample(&self, delta_t: usize) -> Result<Vec<[f64; 2]>> {
        if delta_t == 0 {
            return Err(Error::Precondition("delta_t must be at least 1".into()));
        }
        self.validate()?;
        let mut cumulative = vec![0.0];
        for w in self.points.windows(2) {
            let seg = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            cumulative.push(cumulative.last().unwrap() + seg);
        }
        let total = *cumulative.last().unwrap();
        let mut seg = 0;
        let mut out = Vec::with_capacity(delta_t + 1);
        for j in 0..=delta_t {
            if j == delta_t {
                out.push(*self.points.last().unwrap());
                break;
            }
            let s = total * j as f64 / delta_t as f64;
            while seg + 1 < cumulative.len() - 1 && cumulative[seg + 1] <= s {
                seg += 1;
            }
            let len = cumulative[seg + 1] - cumulative[seg];
            let frac = if len > 0.0 { (s - cumulative[seg]) / len } else { 0.0 };
            let (a, b) = (self.points[seg], self.points[seg + 1]);
            out.push([a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])]);
        }
        Ok(out)
    }
}

/// Pen directions `v_t` and their running sums `p_t` over a window of `ΔT` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct HandwritingTargets {
    pub directions: Vec<[f64; 2]>,
    pub accumulated: Vec<[f64; 2]>,
}

impl HandwritingTargets {
    pub fn delta_t(&self) -> usize {
        self.directions.len()
    }
}

/// Running sums of direction vectors.
pub(crate) fn accumulate(directions: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut acc = [0.0, 0.0];
    directions
        .iter()
        .map(|v| {
            acc = [acc[0] + v[0], acc[1] + v[1]];
            acc
        })
        .collect()
}

pub fn letter_targets(path: &LetterPath, delta_t: usize) -> Result<HandwritingTargets> {
    let pts = path.resample(delta_t)?;
    let directions: Vec<[f64; 2]> = pts
        .windows(2)
        .map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]])
        .collect();
    let accumulated = accumulate(&directions);
    Ok(HandwritingTargets {
        directions,
        accumulated,
    })
}
