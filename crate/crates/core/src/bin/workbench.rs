use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ighsom::batch::{self, BatchOptions};
use ighsom::hierarchy::GrowthParams;
use ighsom::text::{TfSource, TopLConfig};

#[derive(Parser)]
#[command(name = "workbench", version, about = "Interactive GHSOM analysis workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Train, extract rules and filter without the UI.
    Batch(BatchArgs),
}

#[derive(Args)]
struct BatchArgs {
    /// Record CSV.
    #[arg(long)]
    data: PathBuf,
    /// Directory of .txt documents or a JSON corpus file.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Growth parameters as JSON; omitted fields use defaults.
    #[arg(long)]
    params: Option<String>,
    /// Hand-written filter rules (JSON) instead of the extracted ones.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Number of top comment terms aggregated per record.
    #[arg(long, default_value_t = 3)]
    top_l: usize,
    /// Take term frequencies from the corpus instead of the comment.
    #[arg(long)]
    corpus_tf: bool,
}

fn run(cli: Cli) -> ighsom::Result<()> {
    match cli.command {
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(ighsom::http::serve(SocketAddr::new(host, port)))?;
        }
        Command::Batch(a) => {
            let params: GrowthParams = match &a.params {
                Some(json) => serde_json::from_str(json)?,
                None => GrowthParams::default(),
            };
            for warning in params.validate()? {
                log::warn!("{warning}");
            }
            let tf_source = if a.corpus_tf { TfSource::CorpusMax } else { TfSource::Comment };
            let opts = BatchOptions {
                data: a.data,
                corpus: a.corpus,
                out: a.out,
                seed: a.seed,
                params,
                top_l: TopLConfig { l: a.top_l, tf_source },
                rules: a.rules,
            };
            let summary = batch::run(&opts)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
