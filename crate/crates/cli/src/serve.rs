use std::io::Write;
use std::net::IpAddr;
use std::path::PathBuf;

use rolecsp_service::AppState;

use crate::CliError;

#[derive(clap::Args)]
pub struct Args {
    /// 0 picks a free port.
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    /// Directory for session snapshots, restored on start.
    #[arg(long)]
    snapshots: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<(), CliError> {
    let state = match a.snapshots {
        Some(dir) => AppState::with_snapshots(dir.clone()).map_err(|e| CliError::io(&dir, e))?,
        None => AppState::new(),
    };
    let rt = tokio::runtime::Runtime::new().map_err(CliError::input)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.bind, a.port)).await.map_err(CliError::input)?;
        let addr = listener.local_addr().map_err(CliError::input)?;
        println!("listening on {addr}");
        println!("port {}", addr.port());
        std::io::stdout().flush().ok();
        rolecsp_service::serve(listener, state).await.map_err(CliError::input)
    })
}
