//! Position traces: CSV `station,time_s,x_m,y_m` with a header row.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::rwp::Arena;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Deserialize)]
struct Row {
    station: u32,
    time_s: f64,
    x_m: f64,
    y_m: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MobilityTrace {
    pub tracks: BTreeMap<u32, Vec<TrackPoint>>,
}

impl MobilityTrace {
    /// Parses and validates a trace. Samples must be strictly increasing in
    /// time per station and, if `arena` is given, lie inside it.
    pub fn parse(text: &str, arena: Option<Arena>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let expected = ["station", "time_s", "x_m", "y_m"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{}`", expected.join(",")),
            });
        }
        let mut tracks: BTreeMap<u32, Vec<TrackPoint>> = BTreeMap::new();
        for (i, rec) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let r = rec.map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            if !(r.time_s.is_finite() && r.x_m.is_finite() && r.y_m.is_finite()) {
                return Err(Error::Parse {
                    line,
                    msg: "non-finite value".into(),
                });
            }
            if let Some(a) = arena {
                if !a.contains([r.x_m, r.y_m]) {
                    return Err(Error::Config(format!(
                        "trace line {line}: position ({}, {}) outside the arena",
                        r.x_m, r.y_m
                    )));
                }
            }
            let v = tracks.entry(r.station).or_default();
            if v.last().is_some_and(|p| p.t >= r.time_s) {
                return Err(Error::Parse {
                    line,
                    msg: format!("time {} does not increase for station {}", r.time_s, r.station),
                });
            }
            v.push(TrackPoint {
                t: r.time_s,
                x: r.x_m,
                y: r.y_m,
            });
        }
        Ok(MobilityTrace { tracks })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["station", "time_s", "x_m", "y_m"]).expect("in-memory write");
        for (s, v) in &self.tracks {
            for p in v {
                w.write_record([s.to_string(), p.t.to_string(), p.x.to_string(), p.y.to_string()])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Last sample time over all stations.
    pub fn end_time(&self) -> f64 {
        self.tracks
            .values()
            .filter_map(|v| v.last())
            .map(|p| p.t)
            .fold(0.0, f64::max)
    }

    pub fn position_at(&self, station: u32, t: f64) -> Option<[f64; 2]> {
        self.tracks.get(&station).map(|v| interpolate(v, t))
    }
}

/// Linear interpolation, clamped to the first and last samples.
pub fn interpolate(track: &[TrackPoint], t: f64) -> [f64; 2] {
    let first = track[0];
    if t <= first.t {
        return [first.x, first.y];
    }
    let i = track.partition_point(|p| p.t <= t);
    if i >= track.len() {
        let l = track[track.len() - 1];
        return [l.x, l.y];
    }
    let (a, b) = (track[i - 1], track[i]);
    let f = (t - a.t) / (b.t - a.t);
    [a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)]
}

/// One station moving along a straight line at constant speed.
pub fn straight_line_trace(from: [f64; 2], to: [f64; 2], duration_s: f64) -> Vec<TrackPoint> {
    vec![
        TrackPoint {
            t: 0.0,
            x: from[0],
            y: from[1],
        },
        TrackPoint {
            t: duration_s,
            x: to[0],
            y: to[1],
        },
    ]
}

/// Axis-aligned walk between centres of adjacent cells of a grid, at
/// constant speed, staying within the cells whose centres lie in `arena`.
/// Every cell change is to a 4-neighbor.
pub fn manhattan_trace<R: Rng>(
    rows: usize,
    cols: usize,
    cell_side: f64,
    arena: Arena,
    speed: f64,
    duration_s: f64,
    rng: &mut R,
) -> Vec<TrackPoint> {
    let centre = |r: usize, c: usize| [(c as f64 + 0.5) * cell_side, (r as f64 + 0.5) * cell_side];
    let allowed: Vec<(usize, usize)> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .filter(|&(r, c)| arena.contains(centre(r, c)))
        .collect();
    assert!(!allowed.is_empty(), "no cell centre inside the arena");
    let (mut r, mut c) = allowed[rng.gen_range(0..allowed.len())];
    let mut t = 0.0;
    let p = centre(r, c);
    let mut out = vec![TrackPoint { t, x: p[0], y: p[1] }];
    let leg = cell_side / speed;
    while t < duration_s {
        let moves: Vec<(usize, usize)> = [(0isize, 1isize), (0, -1), (1, 0), (-1, 0)]
            .iter()
            .filter_map(|&(dr, dc)| {
                let nr = r.checked_add_signed(dr)?;
                let nc = c.checked_add_signed(dc)?;
                (nr < rows && nc < cols && allowed.contains(&(nr, nc))).then_some((nr, nc))
            })
            .collect();
        if moves.is_empty() {
            break;
        }
        (r, c) = moves[rng.gen_range(0..moves.len())];
        t += leg;
        let p = centre(r, c);
        out.push(TrackPoint { t, x: p[0], y: p[1] });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interpolates_linearly() {
        let tr = MobilityTrace::parse("station,time_s,x_m,y_m\n0,0,0,0\n0,10,100,0\n", None).unwrap();
        assert_eq!(tr.position_at(0, 5.0), Some([50.0, 0.0]));
        assert_eq!(tr.position_at(0, 20.0), Some([100.0, 0.0]));
        assert_eq!(tr.position_at(1, 5.0), None);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            MobilityTrace::parse("t,x\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            MobilityTrace::parse("station,time_s,x_m,y_m\n0,1,0,0\n0,1,5,5\n", None),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            MobilityTrace::parse("station,time_s,x_m,y_m\n0,1,0,zz\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        let arena = Arena {
            min: [0.0, 0.0],
            max: [10.0, 10.0],
        };
        assert!(matches!(
            MobilityTrace::parse("station,time_s,x_m,y_m\n0,0,50,0\n", Some(arena)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let arena = Arena::interior(6, 6, 80.0, 4);
        let mut t = MobilityTrace::default();
        t.tracks.insert(3, manhattan_trace(6, 6, 80.0, arena, 10.0, 60.0, &mut rng));
        let back = MobilityTrace::parse(&t.to_csv(), Some(arena)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn manhattan_moves_are_adjacent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let arena = Arena::interior(6, 6, 80.0, 4);
        let tr = manhattan_trace(6, 6, 80.0, arena, 15.0, 120.0, &mut rng);
        assert!(tr.len() > 10);
        for w in tr.windows(2) {
            let d = (w[1].x - w[0].x).abs() + (w[1].y - w[0].y).abs();
            assert!((d - 80.0).abs() < 1e-9);
            assert!(arena.contains([w[1].x, w[1].y]));
        }
    }
}
