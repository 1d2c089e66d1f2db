//! One function per subcommand. Inputs and outputs are files only.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use lexdiv::allotax::write_bundle;
use lexdiv::ingest::{
    fetch_dump, ingest_files, load_frequency_table, persist_frequency_table, FetchOptions,
    IngestOptions,
};
use lexdiv::rank::{comments_per_day, rank_pair, write_two_column, zipf_distribution};
use lexdiv::rtd::divergence_report;
use lexdiv::stats::{adf_test, bootstrap_means, ks_two_sample, AdfOptions, KsMode, Regression};
use lexdiv::{
    build_allotax, dominance_table, relative_frequency_series, top_biased, AllotaxOptions,
    BiasQuery, Direction, DivergenceConfig, DivergenceEntry, DominanceMode, FrequencyTable,
    MonthlyPanel, RankScope, Style,
};

use crate::config::{require_paths, CorpusConfig};
use crate::io::{label_of, read_column, read_series, Meta};
use crate::{
    AdfArgs, AllotaxArgs, BootstrapArgs, ColumnArgs, Context, DivergenceArgs, DominanceArgs,
    IngestArgs, KsArgs, KsKind, Mode, NgramsArgs, PairArgs, ReportFormat, Scope, SeriesArgs,
    TableFormat, Target, Usage,
};

/// Top n-grams per order for one term group.
type BiasRows = Vec<(usize, Vec<DivergenceEntry>)>;
/// Named monthly series.
type NamedSeries = Vec<(String, Vec<(lexdiv::YearMonth, f64)>)>;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

impl Context {
    fn out(&self, name: impl AsRef<Path>) -> PathBuf {
        self.out_dir.join(name)
    }

    fn meta(&self, command: &str, args: &impl serde::Serialize) -> Meta {
        Meta::new(command, &self.config, args, self.seed)
    }

    /// `--a`/`--b` if given, else the first table listed in the config.
    fn table_path(&self, flag: &Option<PathBuf>, side: &str) -> Result<PathBuf> {
        let configured = if side == "a" {
            &self.config.tables_a
        } else {
            &self.config.tables_b
        };
        let p = flag
            .clone()
            .or_else(|| configured.first().cloned())
            .ok_or_else(|| {
                usage(format!(
                    "no table for system {}: pass --{side} or set tables_{side} in the config",
                    side.to_uppercase()
                ))
            })?;
        require_paths([&p])?;
        Ok(p)
    }

    fn panel(&self, flag: &Option<PathBuf>) -> Result<MonthlyPanel> {
        let p = flag
            .clone()
            .or_else(|| self.config.panel.clone())
            .ok_or_else(|| usage("no panel: pass --panel or set panel in the config"))?;
        require_paths([&p])?;
        Ok(MonthlyPanel::load_dir(&p)?)
    }
}

fn finish(mut w: impl Write) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Splits each comma-separated group into its non-empty tokens.
fn term_groups(raw: &[String]) -> Result<Vec<Vec<String>>> {
    raw.iter()
        .map(|g| {
            let group: Vec<String> = g
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            if group.is_empty() {
                return Err(usage(format!("empty term group {g:?}")));
            }
            Ok(group)
        })
        .collect()
}

pub fn ingest(ctx: &Context, args: &IngestArgs) -> Result<()> {
    let corpora = if args.inputs.is_empty() && args.urls.is_empty() {
        let mut c = ctx.config.corpora.clone();
        if !args.sources.is_empty() {
            c.iter_mut().for_each(|c| c.sources = args.sources.clone());
        }
        c
    } else {
        require_paths(&args.inputs)?;
        let mut paths = args.inputs.clone();
        for url in &args.urls {
            let name = url
                .rsplit('/')
                .next()
                .filter(|n| !n.is_empty())
                .ok_or_else(|| usage(format!("cannot name a file after {url:?}")))?;
            let dest = ctx.out("downloads").join(name);
            std::fs::create_dir_all(dest.parent().expect("joined path has a parent"))?;
            log::info!("downloading {url}");
            fetch_dump(url, &dest, &FetchOptions::default())?;
            paths.push(dest);
        }
        vec![CorpusConfig {
            label: args.label.clone(),
            paths,
            sources: args.sources.clone(),
        }]
    };
    if corpora.is_empty() {
        return Err(usage(
            "no input: pass --input or list corpora in the config",
        ));
    }
    let orders = args
        .orders
        .clone()
        .unwrap_or_else(|| ctx.config.orders.clone());
    let meta = ctx.meta("ingest", args);
    let header = meta.lines();
    std::fs::create_dir_all(&ctx.out_dir)
        .with_context(|| format!("creating {}", ctx.out_dir.display()))?;

    for corpus in &corpora {
        let label = &corpus.label;
        let opts = IngestOptions {
            label: label.clone(),
            filter: ctx.config.filter.clone(),
            clean: ctx.config.clean.clone(),
            orders: orders.clone(),
            strict: args.strict,
            sources: corpus.sources.clone(),
            monthly: args.monthly,
            ..Default::default()
        };
        let out = ingest_files(&corpus.paths, &opts)?;
        for t in &out.tables {
            let p = ctx.out(format!("{label}.{}gram.tsv", t.order()));
            log::info!("writing {}", p.display());
            persist_frequency_table(t, &p, &header)?;
        }
        meta.write_json(&ctx.out(format!("{label}.manifest.json")), &out.manifest)?;

        let mut w = meta.create_tsv(&ctx.out(format!("{label}.skipped.tsv")))?;
        writeln!(w, "file\tline\treason")?;
        for s in &out.skips {
            for e in &s.report.entries {
                writeln!(w, "{}\t{}\t{}", s.path.display(), e.line, e.reason)?;
            }
        }
        finish(w)?;

        let mut w = meta.create_tsv(&ctx.out(format!("{label}.comments.tsv")))?;
        writeln!(w, "created_utc\ttokens")?;
        for (t, n) in out.comment_times.iter().zip(&out.comment_lengths) {
            writeln!(w, "{t}\t{n}")?;
        }
        finish(w)?;

        if args.monthly {
            let panel = MonthlyPanel::from_tables(out.monthly)?;
            panel.save_dir(&ctx.out(format!("{label}.months")), &header)?;
        }
        let m = &out.manifest;
        println!(
            "{label}: {} comments, {} tokens, {} skipped lines, {} rejected",
            m.record_count,
            m.token_count,
            m.skipped_lines,
            m.rejections.total()
        );
    }
    Ok(())
}

fn load_pair(
    ctx: &Context,
    a: &Option<PathBuf>,
    b: &Option<PathBuf>,
) -> Result<(FrequencyTable, FrequencyTable)> {
    let a = load_frequency_table(&ctx.table_path(a, "a")?)?;
    let b = load_frequency_table(&ctx.table_path(b, "b")?)?;
    Ok((a, b))
}

pub fn rank(ctx: &Context, args: &PairArgs) -> Result<()> {
    let a = load_frequency_table(&ctx.table_path(&args.a, "a")?)?;
    let b = match args.b.is_some() || !ctx.config.tables_b.is_empty() {
        true => Some(load_frequency_table(&ctx.table_path(&args.b, "b")?)?),
        false => None,
    };
    let empty = FrequencyTable::new(a.order(), "");
    let (ra, rb) = rank_pair(&a, b.as_ref().unwrap_or(&empty))?;
    let meta = ctx.meta("rank", args);
    let mut w = meta.create_tsv(&ctx.out(format!("{}.a.tsv", args.out)))?;
    ra.write_tsv(&mut w)?;
    finish(w)?;
    if b.is_some() {
        let mut w = meta.create_tsv(&ctx.out(format!("{}.b.tsv", args.out)))?;
        rb.write_tsv(&mut w)?;
        finish(w)?;
    }
    Ok(())
}

pub fn divergence(ctx: &Context, args: &DivergenceArgs) -> Result<()> {
    let (a, b) = load_pair(ctx, &args.a, &args.b)?;
    let (ra, rb) = rank_pair(&a, &b)?;
    let cfg = DivergenceConfig::new(args.alpha.unwrap_or(ctx.config.alpha))?;
    let mut report = divergence_report(&ra, &rb, &cfg)?;
    if let Some(n) = args.top {
        report.entries.truncate(n);
    }
    let meta = ctx.meta("divergence", args);
    match args.format {
        ReportFormat::Tsv => {
            let mut w = meta.create_tsv(&ctx.out(format!("{}.tsv", args.out)))?;
            writeln!(w, "# alpha: {}", report.alpha)?;
            writeln!(w, "# total: {}", report.total)?;
            report.write_tsv(&mut w)?;
            finish(w)?;
        }
        ReportFormat::Json => meta.write_json(&ctx.out(format!("{}.json", args.out)), &report)?,
    }
    println!(
        "{} vs {}: total divergence {}",
        report.label_a, report.label_b, report.total
    );
    Ok(())
}

pub fn allotax(ctx: &Context, args: &AllotaxArgs) -> Result<()> {
    let (a, b) = load_pair(ctx, &args.a, &args.b)?;
    let style = match args.style.as_ref().or(ctx.config.style.as_ref()) {
        Some(p) => {
            require_paths([p])?;
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<Style>(&text)
                .with_context(|| format!("style {}", p.display()))?
        }
        None => Style::default(),
    };
    let seed = style.seed.unwrap_or(ctx.seed);
    let opts = AllotaxOptions {
        alpha: args.alpha.unwrap_or(ctx.config.alpha),
        bins_per_decade: args.bins_per_decade.unwrap_or(ctx.config.bins_per_decade),
        shift_len: args.shift_len,
        seed,
        min_label_rank: args.min_label_rank,
    };
    let (spec, _) = build_allotax(&a, &b, &opts)?;
    let mut meta = ctx.meta("allotax", args);
    meta.seed = seed;
    let svg = ctx.out(&args.out);
    if let Some(dir) = svg.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for p in write_bundle(&spec, &style, &svg, &meta.lines())? {
        println!("{}", p.display());
    }
    Ok(())
}

fn tables_by_order(paths: &[PathBuf], side: &str) -> Result<BTreeMap<usize, FrequencyTable>> {
    require_paths(paths)?;
    let mut out = BTreeMap::new();
    for p in paths {
        let t = load_frequency_table(p)?;
        let order = t.order();
        if out.insert(order, t).is_some() {
            return Err(usage(format!(
                "two {order}-gram tables given for system {side}"
            )));
        }
    }
    Ok(out)
}

fn order_name(n: usize) -> String {
    match n {
        1 => "unigrams".into(),
        2 => "bigrams".into(),
        3 => "trigrams".into(),
        n => format!("{n}-grams"),
    }
}

pub fn ngrams(ctx: &Context, args: &NgramsArgs) -> Result<()> {
    let pick = |flag: &Vec<PathBuf>, cfg: &Vec<PathBuf>| {
        if flag.is_empty() {
            cfg.clone()
        } else {
            flag.clone()
        }
    };
    let a = tables_by_order(&pick(&args.a, &ctx.config.tables_a), "A")?;
    let b = tables_by_order(&pick(&args.b, &ctx.config.tables_b), "B")?;
    let orders: Vec<usize> = match args.order {
        Some(n) if a.contains_key(&n) && b.contains_key(&n) => vec![n],
        Some(n) => {
            return Err(usage(format!(
                "--order {n} needs an {n}-gram table for both systems"
            )))
        }
        None => a
            .keys()
            .filter(|n| **n >= 2 && b.contains_key(n))
            .copied()
            .collect(),
    };
    if orders.is_empty() {
        return Err(usage("no bigram or longer tables given for both systems"));
    }
    let groups = term_groups(&args.terms)?;
    let alpha = args.alpha.unwrap_or(ctx.config.alpha);

    let mut results: Vec<(String, BiasRows)> = Vec::new();
    for g in &groups {
        let mut per_order = Vec::new();
        for &n in &orders {
            let mut q = BiasQuery::new(g.clone());
            q.k = args.k;
            q.alpha = alpha;
            q.target = match args.target {
                Target::A => Direction::A,
                Target::B => Direction::B,
            };
            q.scope = match args.scope {
                Scope::SubLexicon => RankScope::SubLexicon,
                Scope::FullTable => RankScope::FullTable,
            };
            per_order.push((n, top_biased(&a[&n], &b[&n], &q)?));
        }
        results.push((g.join(", "), per_order));
    }

    let meta = ctx.meta("ngrams", args);
    match args.format {
        TableFormat::Tsv => {
            let mut w = meta.create_tsv(&ctx.out(format!("{}.tsv", args.out)))?;
            writeln!(
                w,
                "term\torder\tposition\tngram\trank_A\trank_B\tcontribution"
            )?;
            for (term, per_order) in &results {
                for (n, entries) in per_order {
                    for (i, e) in entries.iter().enumerate() {
                        writeln!(
                            w,
                            "{term}\t{n}\t{}\t{}\t{}\t{}\t{:e}",
                            i + 1,
                            e.ty,
                            e.rank_a,
                            e.rank_b,
                            e.contribution
                        )?;
                    }
                }
            }
            finish(w)?;
        }
        TableFormat::Text => {
            let mut header = vec!["term".to_owned()];
            header.extend(orders.iter().map(|&n| order_name(n)));
            let mut rows: Vec<Vec<String>> = Vec::new();
            for (term, per_order) in &results {
                let height = per_order
                    .iter()
                    .map(|(_, e)| e.len())
                    .max()
                    .unwrap_or(0)
                    .max(1);
                for i in 0..height {
                    let mut row = vec![if i == 0 { term.clone() } else { String::new() }];
                    row.extend(
                        per_order
                            .iter()
                            .map(|(_, e)| e.get(i).map(|e| e.ty.clone()).unwrap_or_default()),
                    );
                    rows.push(row);
                }
            }
            let widths: Vec<usize> = (0..header.len())
                .map(|c| {
                    rows.iter()
                        .chain([&header])
                        .map(|r| r[c].chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut w = meta.create_tsv(&ctx.out(format!("{}.txt", args.out)))?;
            for r in [&header].into_iter().chain(&rows) {
                let cells: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .map(|(s, &wd)| format!("{s:<wd$}"))
                    .collect();
                writeln!(w, "{}", cells.join("  ").trim_end())?;
            }
            finish(w)?;
        }
    }
    Ok(())
}

pub fn dominance(ctx: &Context, args: &DominanceArgs) -> Result<()> {
    let panel = ctx.panel(&args.panel)?;
    let lags = if args.lags.is_empty() {
        ctx.config.lags.clone()
    } else {
        args.lags.clone()
    };
    let mode = match args.mode {
        Mode::Divergence => DominanceMode::Divergence,
        Mode::RawRankGain => DominanceMode::RawRankGain,
    };
    let meta = ctx.meta("dominance", args);
    for lag in lags {
        let table = dominance_table(&panel, lag, mode)?;
        let stem = format!("{}.lag{lag}", args.out);
        let mut w = meta.create_tsv(&ctx.out(format!("{stem}.tsv")))?;
        table.write_grid_tsv(&mut w)?;
        finish(w)?;
        let mut w = meta.create_tsv(&ctx.out(format!("{stem}.txt")))?;
        table.write_grid_text(&mut w)?;
        finish(w)?;
        let mut w = meta.create_tsv(&ctx.out(format!("{stem}.entries.tsv")))?;
        table.write_entries_tsv(&mut w)?;
        finish(w)?;
    }
    Ok(())
}

fn panel_series(panel: &MonthlyPanel, raw: &[String]) -> Result<NamedSeries> {
    Ok(term_groups(raw)?
        .into_iter()
        .map(|g| (g.join("+"), relative_frequency_series(panel, &g)))
        .collect())
}

pub fn series(ctx: &Context, args: &SeriesArgs) -> Result<()> {
    let panel = ctx.panel(&args.panel)?;
    let meta = ctx.meta("series", args);
    for (name, s) in panel_series(&panel, &args.terms)? {
        let mut w = meta.create_tsv(&ctx.out(format!("{name}.series.tsv")))?;
        write_two_column(&mut w, ("month", "relative_frequency"), s)?;
        finish(w)?;
    }
    Ok(())
}

pub fn adf(ctx: &Context, args: &AdfArgs) -> Result<()> {
    require_paths(&args.inputs)?;
    let mut inputs: Vec<(String, Vec<f64>)> = Vec::new();
    for p in &args.inputs {
        inputs.push((label_of(p), read_series(p)?));
    }
    match (&args.panel, args.terms.is_empty()) {
        (Some(_), false) => {
            let panel = ctx.panel(&args.panel)?;
            for (name, s) in panel_series(&panel, &args.terms)? {
                inputs.push((name, s.into_iter().map(|(_, v)| v).collect()));
            }
        }
        (None, false) if ctx.config.panel.is_some() => {
            let panel = ctx.panel(&None)?;
            for (name, s) in panel_series(&panel, &args.terms)? {
                inputs.push((name, s.into_iter().map(|(_, v)| v).collect()));
            }
        }
        (None, false) => return Err(usage("--term needs --panel")),
        (Some(_), true) => return Err(usage("--panel needs at least one --term")),
        (None, true) => {}
    }
    if inputs.is_empty() {
        return Err(usage(
            "no series: pass --input files or --panel with --term",
        ));
    }
    let opts = AdfOptions {
        max_lags: args.max_lags,
        regression: if args.trend {
            Regression::ConstantTrend
        } else {
            Regression::Constant
        },
        fixed_lags: args.fixed_lags,
    };
    let meta = ctx.meta("adf", args);
    let mut w = meta.create_tsv(&ctx.out(&args.out))?;
    writeln!(
        w,
        "# ** significant at the 5% critical value, * at the 10% critical value"
    )?;
    writeln!(w, "term\tstatistic\tp_value\tlags_used\tn_obs")?;
    for (name, s) in &inputs {
        let r = adf_test(s, &opts).with_context(|| format!("series {name}"))?;
        writeln!(
            w,
            "{name}\t{:.3}{}\t{:.4}\t{}\t{}",
            r.statistic,
            r.stars(),
            r.p_value,
            r.lags_used,
            r.n_obs
        )?;
    }
    finish(w)
}

pub fn ks(ctx: &Context, args: &KsArgs) -> Result<()> {
    if args.inputs.len() < 2 {
        return Err(usage("ks needs at least two --input files"));
    }
    require_paths(&args.inputs)?;
    let samples: Vec<(String, Vec<f64>)> = args
        .inputs
        .iter()
        .map(|p| Ok((label_of(p), read_column(p, &args.column)?)))
        .collect::<Result<_>>()?;
    let mode = match args.mode {
        KsKind::Asymptotic => KsMode::Asymptotic,
        KsKind::Subsampled => KsMode::Subsampled {
            size: args.size,
            repetitions: args.repetitions,
            seed: ctx.seed,
        },
    };
    let meta = ctx.meta("ks", args);
    let mut w = meta.create_tsv(&ctx.out(&args.out))?;
    writeln!(w, "a\tb\tn\tm\tstatistic\tp_value")?;
    for (i, (la, x)) in samples.iter().enumerate() {
        for (lb, y) in &samples[i + 1..] {
            let r = ks_two_sample(x, y, mode).with_context(|| format!("{la} vs {lb}"))?;
            writeln!(
                w,
                "{la}\t{lb}\t{}\t{}\t{}\t{}",
                r.n, r.m, r.statistic, r.p_value
            )?;
        }
    }
    finish(w)
}

pub fn bootstrap(ctx: &Context, args: &BootstrapArgs) -> Result<()> {
    require_paths(&args.inputs)?;
    let meta = ctx.meta("bootstrap", args);
    let mut summary = meta.create_tsv(&ctx.out(format!("{}.summary.tsv", args.out)))?;
    writeln!(
        summary,
        "label\tn\tsample_mean\tdraw_size\tmean_of_means\tsd_of_means"
    )?;
    for p in &args.inputs {
        let label = label_of(p);
        let values: Vec<f64> = read_column(p, &args.column)?;
        let r = bootstrap_means(&values, args.samples, args.fraction, ctx.seed)?;
        let sample_mean = values.iter().sum::<f64>() / values.len() as f64;
        writeln!(
            summary,
            "{label}\t{}\t{sample_mean}\t{}\t{}\t{}",
            values.len(),
            r.draw_size,
            r.mean(),
            r.std_dev()
        )?;
        let mut w = meta.create_tsv(&ctx.out(format!("{}.{label}.tsv", args.out)))?;
        write_two_column(&mut w, ("draw", "mean"), (1..).zip(&r.means))?;
        finish(w)?;
    }
    finish(summary)
}

pub fn zipf(ctx: &Context, args: &ColumnArgs) -> Result<()> {
    require_paths(&args.inputs)?;
    let column = args.column.as_deref().unwrap_or("tokens");
    let meta = ctx.meta("zipf", args);
    for p in &args.inputs {
        let values: Vec<u64> = read_column(p, column)?;
        let rows = zipf_distribution(&values)?;
        let mut w = meta.create_tsv(&ctx.out(format!("zipf.{}.tsv", label_of(p))))?;
        write_two_column(&mut w, ("rank", column), rows)?;
        finish(w)?;
    }
    Ok(())
}

pub fn daily(ctx: &Context, args: &ColumnArgs) -> Result<()> {
    require_paths(&args.inputs)?;
    let column = args.column.as_deref().unwrap_or("created_utc");
    let meta = ctx.meta("daily", args);
    for p in &args.inputs {
        let times: Vec<i64> = read_column(p, column)?;
        let days = comments_per_day(times)?;
        let mut w = meta.create_tsv(&ctx.out(format!("daily.{}.tsv", label_of(p))))?;
        write_two_column(&mut w, ("date", "comments"), days)?;
        finish(w)?;
    }
    Ok(())
}
