//! CSV traces and gnuplot scripts.

use std::fmt::Write as _;
use std::io::{Read, Write};

use sketchgossip_core::trace::Record;
use sketchgossip_core::Trace;

use crate::error::Result;

pub const CSV_HEADER: [&str; 4] = ["trial", "iteration", "metric", "value"];

/// Writes `trial,iteration,metric,value` rows. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(trace: &Trace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in trace.records() {
        w.write_record([
            r.trial.to_string(),
            r.iteration.to_string(),
            r.metric.clone(),
            r.value.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Trace> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(crate::error::HarnessError::Csv(format!(
            "expected header {}, found {}",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for row in rd.deserialize::<(usize, u64, String, f64)>() {
        let (trial, iteration, metric, value) = row?;
        records.push(Record {
            trial,
            iteration,
            metric,
            value,
        });
    }
    Ok(Trace::from_records(records))
}

pub fn csv_string(trace: &Trace) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    /// Image written when the script runs.
    pub output: String,
    pub log_y: bool,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            xlabel: "iteration".into(),
            ylabel: "relative error".into(),
            output: "plot.png".into(),
            log_y: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

/// One curve per metric, each the mean over trials. An empty `metrics`
/// slice plots every metric in the trace.
pub fn emit_plot_script(trace: &Trace, metrics: &[&str], style: &PlotStyle) -> String {
    let names: Vec<String> = if metrics.is_empty() {
        trace.metrics()
    } else {
        metrics.iter().map(|m| m.to_string()).collect()
    };
    let curves: Vec<Curve> = names
        .into_iter()
        .map(|m| Curve {
            points: trace.mean_series(&m),
            label: m,
        })
        .collect();
    render(&curves, style)
}

/// One curve per labelled run, all showing the same metric.
pub fn emit_sweep_script(runs: &[(String, Trace)], metric: &str, style: &PlotStyle) -> String {
    let curves: Vec<Curve> = runs
        .iter()
        .map(|(label, t)| Curve {
            label: label.clone(),
            points: t.mean_series(metric),
        })
        .collect();
    render(&curves, style)
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// With no curves an empty data block is still emitted so the script parses.
pub fn render(curves: &[Curve], style: &PlotStyle) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output {}", quote(&style.output));
    if !style.title.is_empty() {
        let _ = writeln!(s, "set title {}", quote(&style.title));
    }
    let _ = writeln!(s, "set xlabel {}", quote(&style.xlabel));
    let _ = writeln!(s, "set ylabel {}", quote(&style.ylabel));
    if style.log_y {
        let _ = writeln!(s, "set logscale y");
        let _ = writeln!(s, "set format y '10^{{%L}}'");
    }
    let _ = writeln!(s, "set key top right");
    let empty = [Curve {
        label: String::new(),
        points: Vec::new(),
    }];
    let shown = if curves.is_empty() { &empty[..] } else { curves };
    for (i, c) in shown.iter().enumerate() {
        let _ = writeln!(s, "$d{i} << EOD");
        for (k, v) in &c.points {
            // nonpositive values have no place on a log axis
            if style.log_y && *v <= 0.0 {
                continue;
            }
            let _ = writeln!(s, "{k} {v:e}");
        }
        let _ = writeln!(s, "EOD");
    }
    let plots: Vec<String> = shown
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let title = if c.label.is_empty() {
                "notitle".to_string()
            } else {
                format!("title {}", quote(&c.label))
            };
            format!("$d{i} using 1:2 with lines {title}")
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_are_doubled() {
        assert_eq!(quote("it's"), "'it''s'");
    }

    #[test]
    fn header_checked() {
        assert!(read_csv("a,b,c,d\n".as_bytes()).is_err());
        assert!(read_csv("trial,iteration,metric,value\n0,x,e,1\n".as_bytes()).is_err());
    }
}
