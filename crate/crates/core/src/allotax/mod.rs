//! Allotaxonographs: the rotated rank-rank histogram, outer-bin labels, the
//! divergence shift list and the three balance bars, plus their SVG and TSV
//! renderings.

pub mod balance;
pub mod histogram;
pub mod labels;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use balance::{balance_bars, Balance};
pub use histogram::{bin_index, bin_lower_rank, build_histogram, CellIndex, HistogramGrid};
pub use labels::{outer_cells, select_bin_labels, BinLabel};
pub use svg::{render_svg, Style};

use crate::error::{Error, Result};
use crate::rank::{rank_pair, FrequencyTable};
use crate::rtd::{divergence_report, DivergenceConfig, DivergenceEntry, DivergenceReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllotaxOptions {
    pub alpha: f64,
    pub bins_per_decade: u32,
    pub shift_len: usize,
    pub seed: u64,
    /// Only cells whose outer rank edge exceeds this get a label.
    pub min_label_rank: f64,
}

impl Default for AllotaxOptions {
    fn default() -> Self {
        Self {
            alpha: crate::rtd::DEFAULT_ALPHA,
            bins_per_decade: 15,
            shift_len: 40,
            seed: 0,
            min_label_rank: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllotaxSpec {
    pub label_a: String,
    pub label_b: String,
    pub alpha: f64,
    pub lexicon_size: usize,
    pub total_divergence: f64,
    pub grid: HistogramGrid,
    pub labels: Vec<BinLabel>,
    /// Leading entries of the divergence report.
    pub shift: Vec<DivergenceEntry>,
    pub balance: Balance,
    pub seed: u64,
}

/// Ranks both tables over their combined lexicon and assembles the figure.
/// The full divergence report is returned alongside.
pub fn build_allotax(
    a: &FrequencyTable,
    b: &FrequencyTable,
    opts: &AllotaxOptions,
) -> Result<(AllotaxSpec, DivergenceReport)> {
    if opts.min_label_rank.is_nan() {
        return Err(Error::invalid("min_label_rank must be a number"));
    }
    let balance = balance_bars(a, b)?;
    let (ra, rb) = rank_pair(a, b)?;
    let report = divergence_report(&ra, &rb, &DivergenceConfig::new(opts.alpha)?)?;
    let index = CellIndex::new(&ra, &rb, opts.bins_per_decade)?;
    let grid = histogram::grid_from_index(&index, opts.bins_per_decade, ra.len() as u64);
    let labels = select_bin_labels(
        &grid,
        &index,
        ra.lexicon().types(),
        opts.seed,
        opts.min_label_rank,
    );
    let spec = AllotaxSpec {
        label_a: a.label().to_owned(),
        label_b: b.label().to_owned(),
        alpha: opts.alpha,
        lexicon_size: ra.len(),
        total_divergence: report.total,
        grid,
        labels,
        shift: report
            .entries
            .iter()
            .take(opts.shift_len)
            .cloned()
            .collect(),
        balance,
        seed: opts.seed,
    };
    Ok((spec, report))
}

impl AllotaxSpec {
    pub fn write_shift_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "position\ttype\trank_A\trank_B\tcontribution\tdirection"
        )?;
        for (k, e) in self.shift.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:e}\t{}",
                k + 1,
                e.ty,
                e.rank_a,
                e.rank_b,
                e.contribution,
                e.direction.as_str()
            )?;
        }
        Ok(())
    }

    pub fn write_labels_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "cell_x\tcell_y\tside\ttype")?;
        for l in &self.labels {
            writeln!(
                out,
                "{}\t{}\t{}\t{}",
                l.cell.0,
                l.cell.1,
                l.side.as_str(),
                l.ty
            )?;
        }
        Ok(())
    }
}

/// Writes `<stem>.svg` and the TSV bundle (`.grid.tsv`, `.shift.tsv`,
/// `.balance.tsv`, `.labels.tsv`) next to it. Each file starts with the
/// `header` lines as comments. Returns the paths written.
pub fn write_bundle(
    spec: &AllotaxSpec,
    style: &Style,
    svg_path: &Path,
    header: &[String],
) -> Result<Vec<PathBuf>> {
    let stem = svg_path.with_extension("");
    let sibling = |suffix: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    let mut written = Vec::new();
    let svg = render_svg(spec, style, header);
    std::fs::write(svg_path, svg).map_err(Error::at_path(svg_path))?;
    written.push(svg_path.to_path_buf());

    type Writer = fn(&AllotaxSpec, &mut Vec<u8>) -> std::io::Result<()>;
    let parts: [(&str, Writer); 4] = [
        (".grid.tsv", |s, o| s.grid.write_tsv(o)),
        (".shift.tsv", |s, o| s.write_shift_tsv(o)),
        (".balance.tsv", |s, o| s.balance.write_tsv(o)),
        (".labels.tsv", |s, o| s.write_labels_tsv(o)),
    ];
    for (suffix, write) in parts {
        let path = sibling(suffix);
        let mut buf = Vec::new();
        for h in header {
            writeln!(buf, "# {h}")?;
        }
        write(spec, &mut buf)?;
        std::fs::write(&path, buf).map_err(Error::at_path(&path))?;
        written.push(path);
    }
    Ok(written)
}
