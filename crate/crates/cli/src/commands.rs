use std::fs;
use std::io::Write;
use std::path::PathBuf;

use regshrink::equal_weights::{
    compare_models, fit_equal_at, fit_equal_shrinkage, EqualWeightsFit, SUM_SCORE_NAME,
};
use regshrink::penalized::{default_grid, fit_path, fit_penalized, CoefficientPath, PenaltySpec};
use regshrink::report::{
    format_number, write_comparison_table, write_cv_curve_csv, write_cv_path_csv, write_path_csv,
    write_schemes_csv,
};
use regshrink::selection::{
    cross_validate_path, cross_validate_shrinkage, default_s_grid, kfold_split, train_test_split, CvCurve,
    PathModel,
};
use regshrink::shrinkage::{apply_shrinkage, ShrinkageFactor};
use regshrink::weighting::evaluate_schemes;
use regshrink::{fit_ols, Dataset, LinearFit};

use crate::cli::{CompareArgs, CompareWeightsArgs, CvArgs, CvModel, FitArgs, FitModel};
use crate::error::{CliError, Result};
use crate::input::read_dataset;
use crate::output::{emit, render, Provenance};

fn coefficient_table(fit: &LinearFit, names: &[String], digits: usize) -> Vec<u8> {
    render(|w| {
        writeln!(w, "term,coefficient")?;
        writeln!(w, "Intercept,{}", format_number(fit.intercept, digits))?;
        for (name, b) in names.iter().zip(fit.coefficients.iter()) {
            writeln!(w, "{name},{}", format_number(*b, digits))?;
        }
        Ok(())
    })
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let data = read_dataset(&args.data.data, args.data.response.as_deref())?;
    let digits = args.output.precision;
    let names = data.column_names().to_vec();
    let mut prov = Provenance::new("fit")
        .with("data", args.data.data.display())
        .with("model", format!("{:?}", args.model).to_lowercase())
        .seed(args.seed);

    let body = match args.model {
        FitModel::Ols => {
            if args.lambda.is_some() {
                return Err(CliError::Usage("--lambda has no effect with --model ols".into()));
            }
            coefficient_table(&fit_ols(&data)?, &names, digits)
        }
        FitModel::Lasso => {
            prov = prov
                .with("alpha", args.penalty.alpha)
                .with("standardize", args.penalty.standardize);
            let mut spec = PenaltySpec::elastic_net(args.penalty.alpha, 0.0, data.p());
            spec.standardize = args.penalty.standardize;
            match args.lambda {
                Some(lambda) => {
                    prov = prov.with("lambda", lambda);
                    coefficient_table(&fit_penalized(&data, &spec.with_lambda(lambda))?, &names, digits)
                }
                None => {
                    let grid = default_grid(&data, &spec)?;
                    let path = fit_path(&data, &spec, &grid)?;
                    render(|w| write_path_csv(w, &path, &names, digits))
                }
            }
        }
        FitModel::Equal => {
            prov = prov.with("alpha", args.penalty.alpha);
            let mut terms = vec![SUM_SCORE_NAME.to_string()];
            terms.extend(names.iter().cloned());
            match args.lambda {
                Some(lambda) => {
                    prov = prov.with("lambda", lambda);
                    let fit = fit_equal_at(&data, args.penalty.alpha, lambda)?;
                    let implied = fit.implied_coefficients();
                    let f = |x| format_number(x, digits);
                    render(|w| {
                        writeln!(w, "term,coefficient,implied")?;
                        writeln!(w, "Intercept,{},{}", f(fit.intercept), f(implied.intercept))?;
                        writeln!(w, "{SUM_SCORE_NAME},{},NA", f(fit.xi))?;
                        for (j, name) in names.iter().enumerate() {
                            writeln!(w, "{name},{},{}", f(fit.gammas[j]), f(implied.coefficients[j]))?;
                        }
                        Ok(())
                    })
                }
                None => {
                    let path = fit_equal_shrinkage(&data, args.penalty.alpha, None)?;
                    render(|w| write_path_csv(w, &path, &terms, digits))
                }
            }
        }
    };
    emit(args.output.out.as_deref(), &prov.with("precision", digits), &body)
}

fn path_model(model: CvModel, standardize: bool) -> PathModel {
    match model {
        CvModel::Equal => PathModel::EqualWeights,
        _ => PathModel::StandardLasso { standardize },
    }
}

fn chosen(prov: Provenance, curve: &CvCurve, label: &str, digits: usize) -> Provenance {
    prov.note(
        &format!("{label}_min"),
        format_number(curve.grid[curve.chosen_min], digits),
    )
    .note(
        &format!("{label}_1se"),
        format_number(curve.grid[curve.chosen_1se], digits),
    )
}

fn coefficients_path(args: &CvArgs) -> Option<PathBuf> {
    args.coef_out.clone().or_else(|| {
        let out = args.output.out.as_ref()?;
        let stem = out.file_stem()?.to_string_lossy();
        Some(out.with_file_name(format!("{stem}_coefficients.csv")))
    })
}

/// `term,min,1se`, plus implied per-predictor columns for the equal-weights
/// model.
fn selected_coefficients(
    model: CvModel,
    data: &Dataset,
    curve: &CvCurve,
    path: Option<&CoefficientPath>,
    digits: usize,
) -> Result<Vec<u8>> {
    let f = |x: f64| format_number(x, digits);
    let names = data.column_names();
    Ok(match (model, path) {
        (CvModel::Equal, Some(path)) => {
            let fits = [curve.chosen_min, curve.chosen_1se].map(|k| EqualWeightsFit::from_path(path, k));
            let implied = [fits[0].implied_coefficients(), fits[1].implied_coefficients()];
            render(|w| {
                writeln!(w, "term,min,1se,implied_min,implied_1se")?;
                writeln!(
                    w,
                    "Intercept,{},{},{},{}",
                    f(fits[0].intercept),
                    f(fits[1].intercept),
                    f(implied[0].intercept),
                    f(implied[1].intercept)
                )?;
                writeln!(w, "{SUM_SCORE_NAME},{},{},NA,NA", f(fits[0].xi), f(fits[1].xi))?;
                for (j, name) in names.iter().enumerate() {
                    writeln!(
                        w,
                        "{name},{},{},{},{}",
                        f(fits[0].gammas[j]),
                        f(fits[1].gammas[j]),
                        f(implied[0].coefficients[j]),
                        f(implied[1].coefficients[j])
                    )?;
                }
                Ok(())
            })
        }
        _ => {
            let fits: Vec<LinearFit> = match path {
                Some(path) => vec![path.fit_at(curve.chosen_min), path.fit_at(curve.chosen_1se)],
                None => [curve.chosen_min, curve.chosen_1se]
                    .iter()
                    .map(|&k| apply_shrinkage(data, ShrinkageFactor::new(curve.grid[k])?))
                    .collect::<regshrink::Result<_>>()?,
            };
            render(|w| {
                writeln!(w, "term,min,1se")?;
                writeln!(w, "Intercept,{},{}", f(fits[0].intercept), f(fits[1].intercept))?;
                for (j, name) in names.iter().enumerate() {
                    writeln!(
                        w,
                        "{name},{},{}",
                        f(fits[0].coefficients[j]),
                        f(fits[1].coefficients[j])
                    )?;
                }
                Ok(())
            })
        }
    })
}

pub fn cv(args: &CvArgs) -> Result<()> {
    let data = read_dataset(&args.data.data, args.data.response.as_deref())?;
    let digits = args.output.precision;
    let folds = kfold_split(data.n(), args.folds, args.seed)?;
    let prov = Provenance::new("cv")
        .with("data", args.data.data.display())
        .with("model", format!("{:?}", args.model).to_lowercase())
        .with("folds", args.folds)
        .with("precision", digits)
        .seed(args.seed);

    let (prov, curve, path, body) = match args.model {
        CvModel::Shrink => {
            let curve = cross_validate_shrinkage(&data, &default_s_grid(), &folds)?;
            let prov = chosen(prov, &curve, "s", digits);
            let body = render(|w| write_cv_curve_csv(w, &curve, digits));
            (prov, curve, None, body)
        }
        model => {
            let model = path_model(model, args.penalty.standardize);
            let mut prov = prov.with("alpha", args.penalty.alpha);
            if let PathModel::StandardLasso { standardize } = model {
                prov = prov.with("standardize", standardize);
            }
            let grid = model.default_grid(&data, args.penalty.alpha)?;
            let curve = cross_validate_path(&data, model, args.penalty.alpha, Some(&grid), &folds)?;
            let path = model.fit_path(&data, args.penalty.alpha, &grid)?;
            let nonzero: Vec<usize> = (0..path.len()).map(|k| path.n_nonzero(k)).collect();
            let prov = chosen(prov, &curve, "lambda", digits);
            let body = render(|w| write_cv_path_csv(w, &curve, &nonzero, digits));
            (prov, curve, Some(path), body)
        }
    };
    emit(args.output.out.as_deref(), &prov, &body)?;
    if let Some(coef) = coefficients_path(args) {
        let table = selected_coefficients(args.model, &data, &curve, path.as_ref(), digits)?;
        emit(Some(&coef), &prov, &table)?;
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let data = read_dataset(&args.data.data, args.data.response.as_deref())?;
    let digits = args.precision;
    let folds = kfold_split(data.n(), args.folds, args.seed)?;
    let cmp = compare_models(&data, args.penalty.alpha, args.penalty.standardize, &folds)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::output(&args.out_dir, e))?;

    let prov = Provenance::new("compare")
        .with("data", args.data.data.display())
        .with("alpha", args.penalty.alpha)
        .with("standardize", args.penalty.standardize)
        .with("folds", args.folds)
        .with("precision", digits)
        .seed(args.seed);
    let table = prov
        .clone()
        .note(
            "cv_mse_standard",
            format_number(cmp.standard.min_cv_mse(), digits),
        )
        .note("cv_mse_equal", format_number(cmp.equal.min_cv_mse(), digits));
    emit(
        Some(&args.out_dir.join("coefficients.csv")),
        &table,
        &render(|w| write_comparison_table(w, &cmp.table, digits)),
    )?;
    for (file, model) in [("cv_standard.csv", &cmp.standard), ("cv_equal.csv", &cmp.equal)] {
        let p = chosen(
            prov.clone().with("model", model.model.name()),
            &model.curve,
            "lambda",
            digits,
        );
        let body = render(|w| write_cv_path_csv(w, &model.curve, &model.n_nonzero(), digits));
        emit(Some(&args.out_dir.join(file)), &p, &body)?;
    }
    Ok(())
}

pub fn compare_weights(args: &CompareWeightsArgs) -> Result<()> {
    let data = read_dataset(&args.data.data, args.data.response.as_deref())?;
    let digits = args.output.precision;
    let mut prov = Provenance::new("compare-weights")
        .with("data", args.data.data.display())
        .seed(args.seed);
    let (train, test) = match &args.test {
        Some(path) => {
            let test = read_dataset(path, args.data.response.as_deref())?;
            if data.column_names() != test.column_names() {
                return Err(CliError::Usage(format!(
                    "predictor columns differ between {} and {}",
                    args.data.data.display(),
                    path.display()
                )));
            }
            prov = prov.with("test", path.display());
            (data, test)
        }
        None => {
            let (train_rows, test_rows) = train_test_split(data.n(), args.train_frac, args.seed)?;
            prov = prov.with("train_frac", args.train_frac);
            (data.subset(&train_rows)?, data.subset(&test_rows)?)
        }
    };
    let results = evaluate_schemes(&train, &test)?;
    emit(
        args.output.out.as_deref(),
        &prov.with("precision", digits),
        &render(|w| write_schemes_csv(w, &results, digits)),
    )
}
