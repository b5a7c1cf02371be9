use std::path::Path;

use altscan::corpus::LabeledSegment;
use altscan::langid::{
    evaluate, stratified_split, train_char_ngram, train_hashed_linear, train_naive_bayes, AnyModel,
};

use crate::config::{PipelineConfig, MODEL_FAMILIES};
use crate::error::{at_path, CliError, CliResult};
use crate::io::{create_dir, read_jsonl, write_json_pretty};

fn train_family(
    config: &PipelineConfig,
    family: &str,
    train: &[LabeledSegment],
) -> CliResult<AnyModel> {
    let model = match family {
        "nb" => AnyModel::NaiveBayes(train_naive_bayes(
            train,
            (config.ngram_min, config.ngram_max),
            config.alpha,
        )?),
        "trigram" => AnyModel::CharNgram(train_char_ngram(train, config.order, config.smoothing)?),
        "hashed" => AnyModel::HashedLinear(train_hashed_linear(train, &config.hashed_params())?.0),
        other => return Err(CliError::Usage(format!("unknown model family {other:?}"))),
    };
    Ok(model)
}

pub fn cmd_train(config: &PipelineConfig) -> CliResult<()> {
    let segments_path = config.require(&config.segments, "segments")?;
    let out_dir = config.require(&config.out_dir, "out-dir")?;
    create_dir(&out_dir)?;

    let segments: Vec<LabeledSegment> = read_jsonl(&segments_path)?;
    let (train, test) = stratified_split(&segments, config.test_fraction, config.seed)?;
    let families: Vec<&str> = if config.model == "all" {
        MODEL_FAMILIES.to_vec()
    } else {
        vec![config.model.as_str()]
    };

    println!("{:<16} macro F1", "model");
    for family in families {
        let model = train_family(config, family, &train)?;
        model.save(&out_dir.join(format!("model.{family}.bin")))?;
        let report = evaluate(&model, &test)?;
        write_json_pretty(&out_dir.join(format!("eval.{family}.json")), &report)?;
        println!("{:<16} {:.4}", model.family(), report.macro_f1);
    }
    config.write_resolved(&out_dir)?;
    Ok(())
}

pub fn cmd_eval(config: &PipelineConfig, out: Option<&Path>) -> CliResult<()> {
    let model_path = config.require(&config.model_file, "model-file")?;
    let segments_path = config.require(&config.segments, "segments")?;

    let model = at_path(AnyModel::load(&model_path), &model_path)?;
    let segments: Vec<LabeledSegment> = read_jsonl(&segments_path)?;
    let report = evaluate(&model, &segments)?;
    match out {
        Some(path) => {
            write_json_pretty(path, &report)?;
            println!("macro F1 {:.4} over {} segments", report.macro_f1, segments.len());
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}
