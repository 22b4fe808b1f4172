use actnoise::stats::{
    aggregate_curve, anova_eta2, cohen_d, cohen_d_magnitude, eta_squared_magnitude, games_howell, levene_bf, spearman,
    standardize_groups, welch_t, FactorialTable, Group,
};
use anyhow::{bail, Result};

use crate::args::{StatsArgs, StatsTest};
use crate::io::{self, distinct, finite, opt_num, Table};
use crate::manifest::RunManifest;
use crate::UsageError;

const TEST_HEADER: [&str; 9] =
    ["test", "group_a", "group_b", "statistic", "df1", "df2", "p_value", "effect_size", "magnitude"];

fn need_groups(args: &StatsArgs) -> Result<()> {
    if args.group.is_empty() {
        return Err(UsageError(format!("{} needs --group", args.test.name())).into());
    }
    Ok(())
}

fn groups(table: &Table, args: &StatsArgs) -> Result<Vec<Group>> {
    need_groups(args)?;
    let cols = args.group.iter().map(|g| table.column(g)).collect::<Result<Vec<_>>>()?;
    let values = table.numbers(table.column(&args.value)?)?;
    let keys = table.keys(&cols);
    Ok(distinct(&keys)
        .into_iter()
        .map(|label| {
            let v = keys.iter().zip(&values).filter(|(k, _)| **k == label).map(|(_, v)| *v).collect();
            Group::new(label, v)
        })
        .collect())
}

fn two_groups(table: &Table, args: &StatsArgs) -> Result<(Group, Group)> {
    let mut gs = groups(table, args)?;
    if gs.len() != 2 {
        bail!("{} needs exactly two groups, found {}", args.test.name(), gs.len());
    }
    let b = gs.pop().expect("two groups");
    let a = gs.pop().expect("two groups");
    Ok((a, b))
}

pub fn run(args: &StatsArgs) -> Result<()> {
    let table = Table::read(&args.input)?;
    let name = args.test.name();
    let (header, rows): (Vec<String>, Vec<Vec<String>>) = match args.test {
        StatsTest::Welch => {
            let (a, b) = two_groups(&table, args)?;
            let r = welch_t(&a, &b)?;
            let row = vec![
                name.into(),
                a.label,
                b.label,
                finite(r.statistic, "t")?,
                finite(r.df1, "df")?,
                String::new(),
                finite(r.p_value, "p")?,
                opt_num(r.effect_size),
                r.effect_size.map(|d| cohen_d_magnitude(d).name().to_string()).unwrap_or_default(),
            ];
            (owned(&TEST_HEADER), vec![row])
        }
        StatsTest::Cohend => {
            let (a, b) = two_groups(&table, args)?;
            let d = cohen_d(&a, &b)?;
            let row = vec![
                name.into(),
                a.label,
                b.label,
                finite(d, "d")?,
                String::new(),
                String::new(),
                String::new(),
                finite(d, "d")?,
                cohen_d_magnitude(d).name().into(),
            ];
            (owned(&TEST_HEADER), vec![row])
        }
        StatsTest::Levene => {
            let r = levene_bf(&groups(&table, args)?)?;
            let row = vec![
                name.into(),
                String::new(),
                String::new(),
                finite(r.statistic, "F")?,
                finite(r.df1, "df1")?,
                opt_num(r.df2),
                finite(r.p_value, "p")?,
                String::new(),
                String::new(),
            ];
            (owned(&TEST_HEADER), vec![row])
        }
        StatsTest::Spearman => {
            let (Some(x), Some(y)) = (&args.x, &args.y) else {
                return Err(UsageError("spearman needs --x and --y".into()).into());
            };
            let xs = table.numbers(table.column(x)?)?;
            let ys = table.numbers(table.column(y)?)?;
            let rho = spearman(&xs, &ys)?;
            let row = vec![
                name.into(),
                x.clone(),
                y.clone(),
                finite(rho, "rho")?,
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ];
            (owned(&TEST_HEADER), vec![row])
        }
        StatsTest::Gameshowell => {
            let res = games_howell(&groups(&table, args)?)?;
            let rows = res
                .into_iter()
                .map(|p| {
                    Ok(vec![
                        p.group_a,
                        p.group_b,
                        finite(p.mean_diff, "mean difference")?,
                        opt_num(Some(p.statistic)),
                        opt_num(Some(p.df)),
                        opt_num(Some(p.p_value)),
                        p.degenerate.to_string(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            (owned(&["group_a", "group_b", "mean_diff", "statistic", "df", "p_value", "degenerate"]), rows)
        }
        StatsTest::Anova => anova(&table, args)?,
        StatsTest::Standardize => {
            need_groups(args)?;
            let cols = args.group.iter().map(|g| table.column(g)).collect::<Result<Vec<_>>>()?;
            let values = table.numbers(table.column(&args.value)?)?;
            let res = standardize_groups(&values, &table.keys(&cols))?;
            let mut header = table.header.clone();
            header.push("z".into());
            let rows = table
                .rows
                .iter()
                .zip(&res.z)
                .map(|((_, r), z)| {
                    let mut r = r.clone();
                    r.push(opt_num(*z));
                    r
                })
                .collect();
            (header, rows)
        }
        StatsTest::Aggregate => {
            need_groups(args)?;
            let cols = args.group.iter().map(|g| table.column(g)).collect::<Result<Vec<_>>>()?;
            let values = table.numbers(table.column(&args.value)?)?;
            let keys = table.keys(&cols);
            let mut rows = Vec::new();
            for key in distinct(&keys) {
                let first = keys.iter().position(|k| *k == key).expect("key from the same list");
                let seg: Vec<f64> = keys.iter().zip(&values).filter(|(k, _)| **k == key).map(|(_, v)| *v).collect();
                let mut row: Vec<String> = cols.iter().map(|&c| table.rows[first].1[c].clone()).collect();
                row.push(finite(aggregate_curve(&seg)?, "aggregate")?);
                row.push(seg.len().to_string());
                rows.push(row);
            }
            let mut header = args.group.clone();
            header.push(args.value.clone());
            header.push("segments".into());
            (header, rows)
        }
    };

    let out = &args.output.out;
    io::ensure_dir(out)?;
    let mut manifest = RunManifest::new("stats", None, args)?;
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    manifest.outputs.push(io::write_csv(out, &format!("stats_{name}.csv"), &header, &rows)?);
    manifest.write_as(out, &format!("stats_{name}"))
}

fn owned(h: &[&str]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

fn anova(table: &Table, args: &StatsArgs) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    if args.factors.is_empty() {
        return Err(UsageError("anova needs --factors".into()).into());
    }
    let cols = args.factors.iter().map(|f| table.column(f)).collect::<Result<Vec<_>>>()?;
    let values = table.numbers(table.column(&args.value)?)?;
    let obs: Vec<(Vec<String>, f64)> =
        table.rows.iter().zip(values).map(|((_, r), v)| (cols.iter().map(|&c| r[c].clone()).collect(), v)).collect();
    let fac = FactorialTable::from_labels(&args.factors, &obs)?;
    let res = anova_eta2(&fac)?;
    let mut rows = Vec::new();
    for t in &res.terms {
        rows.push(vec![
            t.name.clone(),
            finite(t.df, "df")?,
            finite(t.sum_sq, "sum of squares")?,
            opt_num(t.f),
            opt_num(t.p_value),
            finite(t.eta_sq, "eta squared")?,
            finite(t.partial_eta_sq, "partial eta squared")?,
            eta_squared_magnitude(t.eta_sq).name().into(),
        ]);
    }
    let blank = String::new;
    rows.push(vec![
        "Residual".into(),
        finite(res.residual_df, "df")?,
        finite(res.residual_sum_sq, "sum of squares")?,
        blank(),
        blank(),
        blank(),
        blank(),
        blank(),
    ]);
    rows.push(vec![
        "Total".into(),
        finite(fac.len() as f64 - 1.0, "df")?,
        finite(res.total_sum_sq, "sum of squares")?,
        blank(),
        blank(),
        blank(),
        blank(),
        blank(),
    ]);
    Ok((owned(&["term", "df", "sum_sq", "f", "p_value", "eta_sq", "partial_eta_sq", "magnitude"]), rows))
}
