//! CSV rendering. Floats use 17 significant digits so files reproduce bit
//! for bit; provenance lines start with `#` and precede the column header.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::analysis::{IntegrandSeries, MarkovScan, SweepGrid};
use crate::dynamics::{ConventionReport, DensityCurve, FidelityCurve};
use crate::provenance::Provenance;

/// A result with a fixed CSV schema.
pub trait PlotData {
    fn columns(&self) -> &'static str;
    fn write_rows(&self, out: &mut String);
    fn provenance(&self) -> Option<&Provenance> {
        None
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Header comment lines, then the result's own provenance, then the schema.
pub fn render_csv(result: &impl PlotData, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    if let Some(p) = result.provenance() {
        for (k, v) in p.iter() {
            let _ = writeln!(out, "# {k}: {v}");
        }
    }
    out.push_str(result.columns());
    out.push('\n');
    result.write_rows(&mut out);
    out
}

/// Writes `result` to `path`; errors carry the path.
pub fn emit_plotdata(result: &impl PlotData, header: &[String], path: &Path) -> io::Result<()> {
    fs::write(path, render_csv(result, header))
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

impl PlotData for FidelityCurve<f64> {
    fn columns(&self) -> &'static str {
        "t,F,stderr"
    }

    fn write_rows(&self, out: &mut String) {
        for (k, (&t, &f)) in self.times.iter().zip(&self.values).enumerate() {
            let se = self.stderr.as_ref().map_or(0.0, |s| s[k]);
            row(out, &[fmt_f64(t), fmt_f64(f), fmt_f64(se)]);
        }
    }

    fn provenance(&self) -> Option<&Provenance> {
        Some(&self.provenance)
    }
}

/// One probe time of a sweep grid.
pub struct SweepSlice<'a> {
    pub grid: &'a SweepGrid,
    pub probe: usize,
    pub period: f64,
}

impl PlotData for SweepSlice<'_> {
    fn columns(&self) -> &'static str {
        "J,W,t_probe,F,stderr,above_0.99,n_traj"
    }

    fn write_rows(&self, out: &mut String) {
        let g = self.grid;
        let t = g.probe_periods[self.probe] * self.period;
        for (ji, &j) in g.amplitudes.iter().enumerate() {
            for (wi, &w) in g.rates_per_period.iter().enumerate() {
                row(
                    out,
                    &[
                        fmt_f64(j),
                        fmt_f64(w / self.period),
                        fmt_f64(t),
                        fmt_f64(g.fidelity_at(ji, wi, self.probe)),
                        fmt_f64(g.stderr_at(ji, wi, self.probe)),
                        u8::from(g.above_threshold(ji, wi, self.probe)).to_string(),
                        g.n_traj.to_string(),
                    ],
                );
            }
        }
    }
}

impl PlotData for MarkovScan {
    fn columns(&self) -> &'static str {
        "gamma,F_noise,F_free,gain"
    }

    fn write_rows(&self, out: &mut String) {
        for i in 0..self.gammas.len() {
            row(
                out,
                &[
                    fmt_f64(self.gammas[i]),
                    fmt_f64(self.f_noise[i]),
                    fmt_f64(self.f_free[i]),
                    fmt_f64(self.gain[i]),
                ],
            );
        }
    }
}

impl PlotData for IntegrandSeries {
    fn columns(&self) -> &'static str {
        "t,Re N,Im N,Re h,Im h,Re I,Im I"
    }

    fn write_rows(&self, out: &mut String) {
        for k in 0..self.len() {
            let (n, h, i) = (self.n[k], self.h[k], self.partial_integral[k]);
            row(
                out,
                &[
                    fmt_f64(self.times[k]),
                    fmt_f64(n.re),
                    fmt_f64(n.im),
                    fmt_f64(h.re),
                    fmt_f64(h.im),
                    fmt_f64(i.re),
                    fmt_f64(i.im),
                ],
            );
        }
    }
}

impl PlotData for ConventionReport {
    fn columns(&self) -> &'static str {
        "t,log_F_q_exponent,log_F_amplitude,ratio"
    }

    fn write_rows(&self, out: &mut String) {
        for k in 0..self.times.len() {
            row(
                out,
                &[
                    fmt_f64(self.times[k]),
                    fmt_f64(self.log_fidelity_q_exponent[k]),
                    fmt_f64(self.log_fidelity_amplitude[k]),
                    self.ratio[k].map_or_else(String::new, fmt_f64),
                ],
            );
        }
    }
}

impl PlotData for DensityCurve {
    fn columns(&self) -> &'static str {
        "t,rho_11,rho_00,Re rho_10,Im rho_10,stderr_11,stderr_00,stderr_re_10,stderr_im_10"
    }

    fn write_rows(&self, out: &mut String) {
        for k in 0..self.len() {
            let s = self.stderr[k];
            row(
                out,
                &[
                    fmt_f64(self.times[k]),
                    fmt_f64(self.excited[k]),
                    fmt_f64(self.ground[k]),
                    fmt_f64(self.coherence[k].re),
                    fmt_f64(self.coherence[k].im),
                    fmt_f64(s.excited),
                    fmt_f64(s.ground),
                    fmt_f64(s.coherence_re),
                    fmt_f64(s.coherence_im),
                ],
            );
        }
    }

    fn provenance(&self) -> Option<&Provenance> {
        Some(&self.provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn fidelity_schema() {
        let curve = FidelityCurve {
            times: vec![0.0, 1.0],
            values: vec![1.0, 0.5],
            stderr: None,
            provenance: Provenance::new().with("dt", 0.001),
        };
        let text = render_csv(&curve, &["tool".into()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool");
        assert_eq!(lines[1], "# dt: 0.001");
        assert_eq!(lines[2], "t,F,stderr");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4].split(',').count(), 3);
    }
}
