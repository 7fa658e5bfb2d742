//! File emission: CSV profiles (bit-exact round-trip), JSON certificates and
//! reports, optional SVG plots. Plots never influence verdicts.

use crate::report::{NamedProfile, ReportBundle};
use anyhow::{bail, Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use warpcav_core::concavity::w_transform;
use warpcav_core::profile::RadialProfile;

/// Shortest round-trip decimal for f64 (Rust's float Display): parsing the
/// text reproduces the exact bits.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn emit(bundle: &ReportBundle, formats: &[String], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let dir = out_dir.join(&bundle.scenario);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();

    if formats.iter().any(|f| f == "json") {
        let report = dir.join("report.json");
        std::fs::write(&report, serde_json::to_string_pretty(bundle)?)?;
        written.push(report);
        let certs = dir.join("certificates.json");
        std::fs::write(&certs, serde_json::to_string_pretty(&bundle.certificates)?)?;
        written.push(certs);
    }

    if formats.iter().any(|f| f == "csv") {
        // stationary profiles: one file each; evolution states: one file with
        // a leading t column
        let stationary: Vec<&NamedProfile> =
            bundle.profiles.iter().filter(|p| p.time.is_none()).collect();
        let evolution: Vec<&NamedProfile> =
            bundle.profiles.iter().filter(|p| p.time.is_some()).collect();
        for p in stationary {
            let path = dir.join(format!("profile_{}.csv", sanitize(&p.label)));
            std::fs::write(&path, profile_csv(p, false)?)?;
            written.push(path);
        }
        if !evolution.is_empty() {
            let mut text = String::from("t,r,v,w,w1,w2\n");
            for p in &evolution {
                text.push_str(&profile_csv(p, true)?);
            }
            let path = dir.join("evolution.csv");
            std::fs::write(&path, text)?;
            written.push(path);
        }
    }

    if formats.iter().any(|f| f == "svg") {
        for p in bundle.profiles.iter().filter(|p| p.time.is_none()) {
            let path = dir.join(format!("profile_{}.svg", sanitize(&p.label)));
            std::fs::write(&path, profile_svg(p)?)?;
            written.push(path);
        }
        if !bundle.certificates.is_empty() {
            let gaps: Vec<f64> = bundle
                .certificates
                .iter()
                .flat_map(|c| c.certificate.geodesic_results.iter().map(|g| g.gap))
                .collect();
            if !gaps.is_empty() {
                let path = dir.join("gap_histogram.svg");
                std::fs::write(&path, histogram_svg(&gaps))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Rows `r,v,w,w1,w2` (prefixed with `t,` for evolution states). The w
/// columns use the profile's α; nodes where the transform diverges (v ≤ 0 at
/// the boundary with α = 0) print `-inf`.
fn profile_csv(p: &NamedProfile, with_time: bool) -> Result<String> {
    let wt = w_transform(&p.profile, p.alpha).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut text = String::new();
    if !with_time {
        text.push_str("r,v,w,w1,w2\n");
    }
    let t_prefix = p.time.map(fmt_f64);
    for i in 0..=p.profile.intervals() {
        if let Some(t) = &t_prefix {
            write!(text, "{t},")?;
        }
        writeln!(
            text,
            "{},{},{},{},{}",
            fmt_f64(p.profile.r(i)),
            fmt_f64(p.profile.values()[i]),
            fmt_f64(wt.w[i]),
            fmt_f64(wt.w1[i]),
            fmt_f64(wt.w2[i])
        )?;
    }
    Ok(text)
}

/// Re-ingest a profile CSV produced by [`emit`] (bit-exact round trip of the
/// `r` and `v` columns).
pub fn read_profile_csv(path: &Path) -> Result<RadialProfile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if ln == 0 && line.starts_with('r') {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let r: f64 = cols.next().context("missing r column")?.parse()?;
        let v: f64 = cols.next().context("missing v column")?.parse()?;
        radii.push(r);
        values.push(v);
    }
    if radii.len() < 3 {
        bail!("profile CSV has fewer than 3 rows");
    }
    let r_max = *radii.last().unwrap();
    // verify the grid is uniform as written
    let m = radii.len() - 1;
    for (i, &r) in radii.iter().enumerate() {
        let expect = r_max * i as f64 / m as f64;
        if (r - expect).abs() > 1e-12 * r_max.max(1.0) {
            bail!("profile CSV grid is not uniform at row {i}");
        }
    }
    Ok(RadialProfile::new(r_max, values, "ingested")?)
}

fn polyline(points: &[(f64, f64)], x0: f64, x1: f64, y0: f64, y1: f64, w: f64, h: f64) -> String {
    let sx = |x: f64| 40.0 + (x - x0) / (x1 - x0).max(1e-300) * (w - 60.0);
    let sy = |y: f64| h - 30.0 - (y - y0) / (y1 - y0).max(1e-300) * (h - 50.0);
    let coords: Vec<String> =
        points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    coords.join(" ")
}

fn profile_svg(p: &NamedProfile) -> Result<String> {
    let (w, h) = (640.0, 400.0);
    let n = p.profile.intervals();
    let pts: Vec<(f64, f64)> = (0..=n).map(|i| (p.profile.r(i), p.profile.values()[i])).collect();
    let (ymin, ymax) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, y)| {
        (a.min(y), b.max(y))
    });
    let line = polyline(&pts, 0.0, p.profile.radius(), ymin.min(0.0), ymax, w, h);
    Ok(format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#,
            r#"<rect width="100%" height="100%" fill="white"/>"#,
            r##"<line x1="40" y1="{base}" x2="{xend}" y2="{base}" stroke="#888"/>"##,
            r##"<line x1="40" y1="20" x2="40" y2="{base}" stroke="#888"/>"##,
            r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{line}"/>"##,
            r#"<text x="45" y="16" font-size="12" font-family="monospace">{label} (alpha={alpha})</text>"#,
            "</svg>\n"
        ),
        w = w,
        h = h,
        base = h - 30.0,
        xend = w - 20.0,
        line = line,
        label = p.label,
        alpha = p.alpha,
    ))
}

fn histogram_svg(gaps: &[f64]) -> String {
    let (w, h) = (640.0, 400.0);
    let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = 40usize;
    let mut counts = vec![0usize; bins];
    let span = (hi - lo).max(1e-300);
    for &g in gaps {
        let b = (((g - lo) / span) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let peak = *counts.iter().max().unwrap_or(&1) as f64;
    let bw = (w - 60.0) / bins as f64;
    let mut bars = String::new();
    for (i, &c) in counts.iter().enumerate() {
        let bh = (h - 50.0) * c as f64 / peak;
        let _ = write!(
            bars,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#2ca02c"/>"##,
            40.0 + i as f64 * bw,
            h - 30.0 - bh,
            bw.max(1.0) - 0.5,
            bh
        );
    }
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#,
            r#"<rect width="100%" height="100%" fill="white"/>"#,
            "{bars}",
            r#"<text x="45" y="16" font-size="12" font-family="monospace">alpha-mean gaps: [{lo:.3e}, {hi:.3e}]</text>"#,
            "</svg>\n"
        ),
        w = w,
        h = h,
        bars = bars,
        lo = lo,
        hi = hi,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let m = 64;
        let values: Vec<f64> = (0..=m)
            .map(|i| {
                let r = i as f64 / m as f64;
                ((1.0 - r * r) / 6.0) * (1.0 + 1e-16)
            })
            .collect();
        let profile = RadialProfile::new(1.0, values.clone(), "t").unwrap();
        let named = NamedProfile { label: "x".into(), time: None, alpha: 1.0, profile };
        let text = profile_csv(&named, false).unwrap();
        let tmp = std::env::temp_dir().join("warpcav_roundtrip_test.csv");
        std::fs::write(&tmp, &text).unwrap();
        let back = read_profile_csv(&tmp).unwrap();
        std::fs::remove_file(&tmp).ok();
        assert_eq!(back.values().len(), values.len());
        for (a, b) in back.values().iter().zip(&values) {
            assert_eq!(a.to_bits(), b.to_bits(), "round trip must be bit-exact");
        }
    }
}
