#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use morphplay::server::{serve, ServerConfig};
use morphplay_core::scene::bundled_house;
use morphplay_core::session::{Mode, SessionConfig, SessionState};
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

pub const SCRIPTS: [&str; 3] = ["entrance_door", "attic_translation", "mixed_session"];

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn script_path(name: &str) -> PathBuf {
    fixture(&format!("scripts/{name}.script"))
}

pub fn golden_path(name: &str) -> PathBuf {
    fixture(&format!("golden/{name}.transcript"))
}

pub struct RunningServer {
    pub addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<Vec<PathBuf>>>,
}

impl RunningServer {
    pub fn url(&self, session: &str) -> String {
        format!("ws://{}/{session}", self.addr)
    }

    pub async fn shutdown(mut self) -> Vec<PathBuf> {
        let _ = self.stop.take().unwrap().send(());
        self.task.await.unwrap().unwrap()
    }
}

pub async fn start_server(
    config: SessionConfig,
    snapshot_dir: Option<PathBuf>,
    restored: Vec<SessionState>,
) -> RunningServer {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = oneshot::channel::<()>();
    let server_config = ServerConfig {
        scene: Arc::new(bundled_house()),
        mode: Mode::Rotation,
        session: config,
        snapshot_dir,
        restored,
    };
    let task = tokio::spawn(serve(listener, server_config, async {
        let _ = stopped.await;
    }));
    RunningServer {
        addr,
        stop: Some(stop),
        task,
    }
}
