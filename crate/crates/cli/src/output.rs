//! CSV and plain-table renderings of result payloads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use kh_core::homology::{BigradedGroup, FieldTable, GroupEntry};
use kh_core::spectral::SpectralPage;
use kh_core::suite::SuiteReport;
use kh_core::thin::ThinAnalysis;

/// "Z^2+Z_2^3" style label.
pub fn entry_label(e: &GroupEntry) -> String {
    let mut parts = Vec::new();
    match e.rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &t in &e.torsion {
        *counts.entry(t).or_insert(0) += 1;
    }
    for (t, k) in counts {
        parts.push(if k == 1 { format!("Z_{t}") } else { format!("Z_{t}^{k}") });
    }
    parts.join("+")
}

/// Grid with homological grading across and polynomial grading down (largest j first).
pub fn grid(cells: &BTreeMap<(i32, i32), String>) -> String {
    if cells.is_empty() {
        return "(zero)\n".to_string();
    }
    let is: BTreeSet<i32> = cells.keys().map(|k| k.0).collect();
    let js: BTreeSet<i32> = cells.keys().map(|k| k.1).collect();
    let (i_lo, i_hi) = (*is.first().unwrap(), *is.last().unwrap());
    let (j_lo, j_hi) = (*js.first().unwrap(), *js.last().unwrap());
    let same_parity = js.iter().all(|j| (j - j_lo) % 2 == 0);
    let rows: Vec<i32> = if same_parity {
        (j_lo..=j_hi).rev().step_by(2).collect()
    } else {
        js.iter().rev().copied().collect()
    };
    let columns: Vec<i32> = (i_lo..=i_hi).collect();
    let width = cells
        .values()
        .map(String::len)
        .chain(columns.iter().map(|i| i.to_string().len()))
        .max()
        .unwrap_or(1)
        .max(1);
    let label_w = rows.iter().map(|j| j.to_string().len()).max().unwrap_or(1).max(3);
    let mut out = String::new();
    let _ = write!(out, "{:>label_w$} |", "j\\i");
    for i in &columns {
        let _ = write!(out, " {i:>width$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(label_w + 2 + columns.len() * (width + 1)));
    for j in rows {
        let _ = write!(out, "{j:>label_w$} |");
        for i in &columns {
            let cell = cells.get(&(*i, j)).map_or(".", String::as_str);
            let _ = write!(out, " {cell:>width$}");
        }
        out.push('\n');
    }
    out
}

pub fn group_table(z: &BigradedGroup) -> String {
    grid(&z.iter().filter(|(_, e)| !e.is_zero()).map(|(k, e)| (k, entry_label(e))).collect())
}

pub fn field_grid(t: &FieldTable) -> String {
    grid(&t.iter().filter(|(_, d)| *d > 0).map(|(k, d)| (k, d.to_string())).collect())
}

pub fn group_csv(z: &BigradedGroup) -> String {
    let mut out = String::from("i,j,rank,torsion\n");
    for ((i, j), e) in z.iter() {
        let t: Vec<String> = e.torsion.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{i},{j},{},{}", e.rank, t.join(";"));
    }
    out
}

pub fn field_csv(t: &FieldTable) -> String {
    let mut out = String::from("i,j,dim\n");
    for ((i, j), d) in t.iter() {
        let _ = writeln!(out, "{i},{j},{d}");
    }
    out
}

pub fn pages_csv(pages: &[SpectralPage]) -> String {
    let mut out = String::from("sequence,r,i,j,dim,rank\n");
    for p in pages {
        let keys: BTreeSet<(i32, i32)> = p.table.iter().map(|(k, _)| k).chain(p.ranks.keys().copied()).collect();
        for (i, j) in keys {
            let rank = p.ranks.get(&(i, j)).copied().unwrap_or(0);
            let _ = writeln!(out, "{},{},{i},{j},{},{rank}", p.sequence, p.r, p.table.get(i, j));
        }
    }
    out
}

pub fn pages_table(pages: &[SpectralPage]) -> String {
    let mut out = String::new();
    for p in pages {
        let _ = writeln!(
            out,
            "{} page {} (d has bidegree ({}, {}), total rank {})",
            p.sequence,
            p.r,
            p.bidegree.0,
            p.bidegree.1,
            p.total_rank()
        );
        out.push_str(&field_grid(&p.table));
        if !p.ranks.is_empty() {
            let ranks: Vec<String> = p.ranks.iter().map(|((i, j), r)| format!("({i},{j}):{r}")).collect();
            let _ = writeln!(out, "ranks of d: {}", ranks.join(" "));
        }
        out.push('\n');
    }
    out
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn thin_csv(a: &ThinAnalysis) -> String {
    let mut out = String::from(
        "region_i1,region_i2,i1,i2,s,thin,odd_primes_agree,torsion_free_start,vanishing_below,stronger,verdict,verified\n",
    );
    for r in &a.regions {
        let h = &r.report;
        let stronger = h.stronger.as_ref().map_or("", |c| if c.holds { "true" } else { "false" });
        let verified = r.verified.as_ref().map_or("", |v| if v.passed { "true" } else { "false" });
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{stronger},{},{verified}",
            r.region.i1,
            r.region.i2,
            h.i1,
            h.i2,
            h.s,
            h.thin.holds,
            h.odd_primes_agree.holds,
            h.torsion_free_start.holds,
            h.vanishing_below.holds,
            h.verdict
        );
    }
    out
}

pub fn thin_table(a: &ThinAnalysis) -> String {
    let mut out = String::from("diagonals 2i-j by homological grading:\n");
    for (i, d) in &a.profile.diagonals {
        let list: Vec<String> = d.iter().map(i32::to_string).collect();
        let _ = writeln!(out, "  i={i}: {{{}}}", list.join(", "));
    }
    for i in &a.thick_gradings {
        let _ = writeln!(
            out,
            "theorem inapplicable at i={i}: support on {} diagonals",
            a.profile.count_at(*i)
        );
    }
    for r in &a.regions {
        let h = &r.report;
        let _ = writeln!(
            out,
            "region [{}, {}] s in {:?}: checked [{}, {}] with s={}",
            r.region.i1, r.region.i2, r.region.s_values, h.i1, h.i2, h.s
        );
        let _ = writeln!(
            out,
            "  (1) thin: {}  (2) odd primes agree: {}  (3) torsion-free start: {}  (4) vanishing below: {}",
            yes(h.thin.holds),
            yes(h.odd_primes_agree.holds),
            yes(h.torsion_free_start.holds),
            yes(h.vanishing_below.holds)
        );
        if let Some(c) = &h.stronger {
            let _ = writeln!(out, "  Lee/Turner differentials vanish at i1-1: {}", yes(c.holds));
        }
        let verified = match &r.verified {
            Some(v) if v.passed => "verified",
            Some(_) => "CONTRADICTED",
            None => "not applicable",
        };
        let _ = writeln!(out, "  verdict: {} ({verified})", if h.verdict { "only Z_2 torsion" } else { "no conclusion" });
        if !r.region.torsion_above.is_empty() {
            let _ = writeln!(out, "  note: torsion at i2+1 echoes into mod-p support at i2: {:?}", r.region.torsion_above);
        }
    }
    out
}

pub fn suite_csv(s: &SuiteReport) -> String {
    let mut out = String::from("label,crossings,check,passed,detail\n");
    for m in &s.members {
        for c in &m.checks {
            let _ = writeln!(out, "{},{},{},{},\"{}\"", m.label, m.crossings, c.name, c.passed, c.detail.replace('"', "'"));
        }
    }
    out
}

pub fn suite_table(s: &SuiteReport) -> String {
    let mut out = String::new();
    for m in &s.members {
        let failed: Vec<&str> = m.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let status = if failed.is_empty() { "PASS".to_string() } else { format!("FAIL {}", failed.join(",")) };
        let _ = writeln!(out, "{:<8} {:>3} crossings  {:>8.2}s  {status}", m.label, m.crossings, m.seconds);
    }
    for sk in &s.skipped {
        let _ = writeln!(out, "{:<8} {:>3} crossings  skipped (over budget)", sk.label, sk.crossings);
    }
    out
}
