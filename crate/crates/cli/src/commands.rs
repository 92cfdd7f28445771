use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use histspec::experiment::{compare_dataset, specify_image, CompareConfig};
use histspec::io::{
    ecdf_points, flatten_columns, inscribe_rectangle, read_csv_path, read_pgm_path, write_csv,
    write_pgm, write_report, AggregateRow, CsvOptions, Method, PgmEncoding, ReportFormat,
    ReportRow, SpecificationReport, TabularDataset,
};
use histspec::{
    decompose, specification_error, specify_detailed, transform_to_reference_with_positions, PNorm,
    PlottingPositions, SortedReference,
};

use crate::args::{
    CompareArgs, ImageDemoArgs, QuantileArgs, ReferenceArg, ReportArgs, SpecifyArgs,
};
use crate::UsageError;

fn read_dataset(path: &Path, options: &CsvOptions) -> Result<TabularDataset> {
    read_csv_path(path, options).with_context(|| format!("reading {}", path.display()))
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn report_extension(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Json => "json",
        ReportFormat::Csv => "csv",
    }
}

/// Writes to `path`, or to standard output when there is none.
fn write_data(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// `<output>.report.<ext>` next to the output, the explicit `--report`
/// path, or standard error.
fn emit_report(
    report: &SpecificationReport,
    args: &ReportArgs,
    output: Option<&Path>,
) -> Result<()> {
    let bytes = write_report(report, args.report_format)?;
    let path = args.report.clone().or_else(|| {
        output.map(|o| {
            let mut name = o.as_os_str().to_owned();
            name.push(format!(".report.{}", report_extension(args.report_format)));
            PathBuf::from(name)
        })
    });
    match path {
        Some(path) => {
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stderr().write_all(&bytes)?,
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(())
}

fn csv_bytes(dataset: &TabularDataset, options: &CsvOptions) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    write_csv(dataset, &mut bytes, options)?;
    Ok(bytes)
}

/// Pairs each input column with a reference column: by name when every
/// input name appears in the reference file, otherwise by position. A
/// single reference column serves every input column.
fn pair_columns<'a>(
    input: &TabularDataset,
    reference: &'a TabularDataset,
    path: &Path,
) -> Result<Vec<(&'a str, &'a [f64])>> {
    let names = reference.names();
    let by_name = input
        .names()
        .iter()
        .all(|name| names.iter().any(|r| r == name));
    if by_name {
        return Ok(input
            .names()
            .iter()
            .map(|name| {
                let k = names.iter().position(|r| r == name).expect("checked above");
                (names[k].as_str(), reference.columns()[k].as_slice())
            })
            .collect());
    }
    if reference.column_count() == 1 {
        let only = (names[0].as_str(), reference.columns()[0].as_slice());
        return Ok(vec![only; input.column_count()]);
    }
    if reference.column_count() < input.column_count() {
        let unpaired = &input.names()[reference.column_count()];
        anyhow::bail!(
            "input column '{unpaired}' has no reference column in {} (pairing by position: {} reference columns for {} input columns)",
            path.display(),
            reference.column_count(),
            input.column_count()
        );
    }
    Ok(reference.iter().take(input.column_count()).collect())
}

/// Accumulates per-column rows and the pooled aggregate for one method.
struct ColumnReport {
    report: SpecificationReport,
    dataset: String,
    method: Method,
    p: PNorm,
    n: usize,
    column_sum: f64,
    pooled: Vec<f64>,
}

impl ColumnReport {
    fn new(dataset: String, method: Method, p: PNorm, n: usize) -> Self {
        ColumnReport {
            report: SpecificationReport::default(),
            dataset,
            method,
            p,
            n,
            column_sum: 0.0,
            pooled: Vec::new(),
        }
    }

    fn push(
        &mut self,
        column: &str,
        input: &[f64],
        output: &[f64],
        reference: &SortedReference,
        label: &str,
        merged: bool,
    ) -> Result<()> {
        let error = specification_error(output, reference, self.p)?;
        let mut sorted = output.to_vec();
        sorted.sort_by(f64::total_cmp);
        self.pooled
            .extend(sorted.iter().zip(reference.values()).map(|(a, b)| a - b));
        self.column_sum += error;
        if merged {
            self.report.warnings.push(format!(
                "{}/{column}: distinct input values merged into one output value",
                self.dataset
            ));
        }
        self.report.rows.push(ReportRow {
            dataset: self.dataset.clone(),
            column: column.to_string(),
            reference: label.to_string(),
            p: self.p,
            method: self.method,
            error,
            n: self.n,
            m: decompose(input)?.group_count(),
            merged_unique_values: merged,
        });
        Ok(())
    }

    fn finish(
        mut self,
        reference: &str,
        parameters: BTreeMap<String, String>,
    ) -> SpecificationReport {
        self.report.parameters = parameters;
        self.report.aggregates.push(AggregateRow {
            dataset: self.dataset,
            reference: reference.to_string(),
            p: self.p,
            method: self.method,
            columns: self.report.rows.len(),
            column_sum: self.column_sum,
            pooled: self.p.norm(self.pooled),
        });
        self.report
    }
}

fn base_parameters(
    command: &str,
    input: &Path,
    positions: PlottingPositions,
    p: PNorm,
    reference: &str,
) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("command".to_string(), command.to_string()),
        ("input".to_string(), input.display().to_string()),
        ("alpha".to_string(), positions.alpha.to_string()),
        ("beta".to_string(), positions.beta.to_string()),
        ("p".to_string(), p.to_string()),
        ("reference".to_string(), reference.to_string()),
    ])
}

fn reference_label(arg: &ReferenceArg, positions: PlottingPositions) -> String {
    match arg {
        ReferenceArg::File(path) => format!("file:{}", path.display()),
        generated => generated.generated(positions).expect("not a file").label(),
    }
}

pub fn specify(args: SpecifyArgs) -> Result<()> {
    let options = args.csv.options();
    let input = read_dataset(&args.input, &options)?;
    let positions = args.positions.positions();
    let n = input.row_count();
    let label = reference_label(&args.reference, positions);

    // (label, sorted reference) per input column.
    let references: Vec<(String, SortedReference)> = match &args.reference {
        ReferenceArg::File(path) => {
            let file = read_dataset(path, &options)?;
            pair_columns(&input, &file, path)?
                .into_iter()
                .zip(input.names())
                .map(|((ref_name, values), name)| {
                    if values.len() != n {
                        return Err(anyhow::Error::new(histspec::Error::LengthMismatch {
                            expected: n,
                            found: values.len(),
                        }))
                        .with_context(|| {
                            format!(
                                "input column '{name}' has {n} rows but reference column '{ref_name}' in {} has {}",
                                path.display(),
                                values.len()
                            )
                        });
                    }
                    let sorted = SortedReference::from_unsorted(values.to_vec())
                        .with_context(|| format!("reference column '{ref_name}' in {}", path.display()))?;
                    Ok((format!("{label}#{ref_name}"), sorted))
                })
                .collect::<Result<_>>()?
        }
        generated => {
            let spec = generated.generated(positions).expect("not a file");
            let sorted = spec.sorted(n, positions)?;
            vec![(label.clone(), sorted); input.column_count()]
        }
    };

    let mut report = ColumnReport::new(dataset_name(&args.input), Method::Algorithm1, args.p, n);
    let mut outputs = Vec::with_capacity(input.column_count());
    for ((name, column), (column_label, sorted)) in input.iter().zip(&references) {
        let s =
            specify_detailed(column, sorted, args.p).with_context(|| format!("column '{name}'"))?;
        let merged = s.has_merged_values();
        report.push(name, column, &s.values, sorted, column_label, merged)?;
        outputs.push(s.values);
    }
    let output = input.with_columns(outputs)?;
    write_data(args.output.as_deref(), &csv_bytes(&output, &options)?)?;

    let parameters = base_parameters("specify", &args.input, positions, args.p, &label);
    let report = report.finish(&label, parameters);
    emit_report(&report, &args.report, args.output.as_deref())
}

pub fn quantile(args: QuantileArgs) -> Result<()> {
    let options = args.csv.options();
    let positions = args.positions.positions();
    let spec = args.reference.generated(positions).ok_or_else(|| {
        UsageError(
            "quantile accepts uniform or normal references; use specify for file references".into(),
        )
    })?;
    let input = read_dataset(&args.input, &options)?;
    let n = input.row_count();
    let sorted = spec.sorted(n, positions)?;
    let label = spec.label();

    let mut report = ColumnReport::new(dataset_name(&args.input), Method::Algorithm2, args.p, n);
    let mut outputs = Vec::with_capacity(input.column_count());
    for (name, column) in input.iter() {
        let values = transform_to_reference_with_positions(column, &spec, args.p, positions)
            .with_context(|| format!("column '{name}'"))?;
        let merged = decompose(column)?.counts() != decompose(&values)?.counts();
        report.push(name, column, &values, &sorted, &label, merged)?;
        outputs.push(values);
    }
    let output = input.with_columns(outputs)?;
    write_data(args.output.as_deref(), &csv_bytes(&output, &options)?)?;

    let parameters = base_parameters("quantile", &args.input, positions, args.p, &label);
    let report = report.finish(&label, parameters);
    emit_report(&report, &args.report, args.output.as_deref())
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let positions = args.positions.positions();
    let config = CompareConfig {
        references: args
            .references
            .0
            .iter()
            .map(|r| {
                r.generated(positions)
                    .expect("file references rejected by the parser")
            })
            .collect(),
        norms: args.p.clone(),
        methods: args.methods.clone(),
        positions,
        baseline_positions: PlottingPositions::new(
            args.baseline_alpha.unwrap_or(args.positions.alpha),
            args.baseline_beta.unwrap_or(args.positions.beta),
        ),
    };
    let input = read_dataset(&args.input, &args.csv.options())?;
    let mut report = compare_dataset(&dataset_name(&args.input), &input, &config)?;
    report
        .parameters
        .insert("input".into(), args.input.display().to_string());
    write_data(
        args.output.as_deref(),
        &write_report(&report, args.report_format)?,
    )?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    match report.dominance {
        Some(true) => eprintln!("algorithm1 has the least error in every row"),
        Some(false) => eprintln!("warning: algorithm1 was beaten in at least one row"),
        None => {}
    }
    Ok(())
}

fn sibling(dir: &Path, stem: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{stem}.{suffix}"))
}

fn write_ecdf(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::from("value,cdf\n");
    for (v, f) in ecdf_points(values)? {
        writeln!(text, "{v},{f}").expect("writing to a String");
    }
    write_data(Some(path), text.as_bytes())
}

pub fn image_demo(args: ImageDemoArgs) -> Result<()> {
    let is_pgm = args
        .output
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm && !args.quantize {
        return Err(UsageError(
            "PGM output holds 8-bit intensities; pass --quantize or choose a .csv output".into(),
        )
        .into());
    }
    let input =
        read_pgm_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let reference = read_pgm_path(&args.reference)
        .with_context(|| format!("reading {}", args.reference.display()))?;

    let mut column = input.width() / 2;
    let input = match args.rect.as_deref() {
        Some(&[x0, y0, w, h]) => {
            column = x0 + w / 2;
            inscribe_rectangle(&input, x0, y0, w, h, args.rect_value)?
        }
        Some(_) => return Err(UsageError("--rect takes X0,Y0,W,H".into()).into()),
        None => input,
    };

    let result = specify_image(&input, &reference, args.p)?;
    let quantized = result.output.quantize();
    let quantized_error = result.quantized_error()?;

    if let Some(parent) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let dir = match &args.data_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.clone()
        }
        None => args
            .output
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default(),
    };

    if args.quantize {
        write_data(
            Some(&args.output),
            &write_pgm(&quantized, PgmEncoding::Binary),
        )?;
    } else {
        let mut text = String::new();
        for row in result.output.values.chunks(result.output.width) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(text, "{}", line.join(",")).expect("writing to a String");
        }
        write_data(Some(&args.output), text.as_bytes())?;
    }

    let stem = dataset_name(&args.output);

    // Scan line down the middle column of the rectangle (or of the image).
    let same_shape = (reference.width(), reference.height()) == (input.width(), input.height());
    let mut scan = String::from(if same_shape {
        "y,input,reference,output\n"
    } else {
        "y,input,output\n"
    });
    for y in 0..input.height() {
        let out = result.output.get(column, y);
        if same_shape {
            writeln!(
                scan,
                "{y},{},{},{out}",
                input.get(column, y),
                reference.get(column, y)
            )
        } else {
            writeln!(scan, "{y},{},{out}", input.get(column, y))
        }
        .expect("writing to a String");
    }
    write_data(Some(&sibling(&dir, &stem, "scanline.csv")), scan.as_bytes())?;

    write_ecdf(
        &sibling(&dir, &stem, "ecdf_input.csv"),
        &flatten_columns(&input),
    )?;
    write_ecdf(
        &sibling(&dir, &stem, "ecdf_reference.csv"),
        result.reference.values(),
    )?;
    write_ecdf(
        &sibling(&dir, &stem, "ecdf_output.csv"),
        &result.output.flatten_columns(),
    )?;

    let name = dataset_name(&args.input);
    let label = format!("image:{}", args.reference.display());
    let m = decompose(&flatten_columns(&input))?.group_count();
    let row = |column: &str, error: f64| ReportRow {
        dataset: name.clone(),
        column: column.to_string(),
        reference: label.clone(),
        p: args.p,
        method: Method::Algorithm1,
        error,
        n: input.len(),
        m,
        merged_unique_values: result.merged_unique_values,
    };
    let mut parameters = BTreeMap::from([
        ("command".to_string(), "image-demo".to_string()),
        ("input".to_string(), args.input.display().to_string()),
        (
            "reference".to_string(),
            args.reference.display().to_string(),
        ),
        ("p".to_string(), args.p.to_string()),
        ("quantize".to_string(), args.quantize.to_string()),
        ("scanline_column".to_string(), column.to_string()),
    ]);
    if let Some(rect) = &args.rect {
        let rect: Vec<String> = rect.iter().map(usize::to_string).collect();
        parameters.insert("rect".into(), rect.join(","));
        parameters.insert("rect_value".into(), args.rect_value.to_string());
    }
    let mut report = SpecificationReport {
        parameters,
        rows: vec![
            row("pixels", result.error),
            row("pixels_quantized", quantized_error),
        ],
        ..SpecificationReport::default()
    };
    if result.merged_unique_values {
        report.warnings.push(format!(
            "{name}: distinct intensities merged into one output value"
        ));
    }
    let report_path = sibling(
        &dir,
        &stem,
        &format!("report.{}", report_extension(args.report_format)),
    );
    write_data(
        Some(&report_path),
        &write_report(&report, args.report_format)?,
    )?;
    eprintln!(
        "error {:.6} before and {:.6} after quantization",
        result.error, quantized_error
    );
    Ok(())
}
