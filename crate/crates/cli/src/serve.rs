use std::fs::OpenOptions;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::sync::{broadcast, mpsc};

use gazearm_core::arm::{ArmGeometry, JointState};
use gazearm_core::classifier::BlockModel;
use gazearm_core::geom::Rect;
use gazearm_core::hri::{LayoutConfig, Session, UiState};
use gazearm_core::mapping::AffineMap;
use gazearm_core::planner::{plan_to_arm_point, AmplitudeConfig, PlannerConfig, Workspace};
use gazearm_core::runtime::{display_to_sheet, error_message, ArmRuntime, Gateway, Pen, SerialLink, SimArm, BROADCAST_INTERVAL_MS, DEFAULT_QUEUE_CAPACITY};

pub struct ServeOptions {
    pub port: u16,
    pub device: Option<PathBuf>,
    pub geometry: Option<String>,
    pub map: Option<String>,
    pub model: Option<BlockModel>,
    pub display: (f64, f64),
    pub duration_s: Option<f64>,
}

type Inbox = mpsc::Sender<(String, mpsc::UnboundedSender<String>)>;

#[derive(Clone)]
struct AppState {
    inbox: Inbox,
    outbox: broadcast::Sender<String>,
}

fn build_gateway(opts: &mut ServeOptions) -> Result<Gateway> {
    let geometry = match &opts.geometry {
        Some(text) => ArmGeometry::from_json(text).context("parsing geometry")?,
        None => ArmGeometry::default(),
    };
    let ws = Workspace::default();
    let (w, h) = opts.display;
    let map = match &opts.map {
        Some(text) => AffineMap::from_json(text).context("parsing map")?,
        None => display_to_sheet(&Rect::new(0.0, 0.0, w, h), &ws.sheet),
    };
    let home = plan_to_arm_point(&geometry, &JointState::new(90.0, 120.0, 60.0), ws.center(), ws.work_height_cm, &PlannerConfig::default())
        .context("sheet centre is out of reach for this geometry")?
        .goal;
    let sim = SimArm::new(geometry, &home).with_pen(Pen::on_plane(ws.work_height_cm));
    let mut runtime = ArmRuntime::new(sim, ws, map);
    if let Some(dev) = &opts.device {
        let port = OpenOptions::new().read(true).write(true).open(dev).with_context(|| format!("opening {}", dev.display()))?;
        let reader = BufReader::new(port.try_clone()?);
        runtime = runtime.with_link(Box::new(SerialLink::new(reader, port)));
    }
    let session = Session::new(UiState::new(LayoutConfig::for_display(w, h), AmplitudeConfig::default()));
    let mut gw = Gateway::new(session, runtime);
    if let Some(model) = opts.model.take() {
        gw = gw.with_model(model);
    }
    Ok(gw)
}

/// Owns the gateway and the arm. Runs on its own thread so backend I/O never
/// stalls the websocket tasks.
fn runtime_loop(mut gw: Gateway, mut inbox: mpsc::Receiver<(String, mpsc::UnboundedSender<String>)>, outbox: broadcast::Sender<String>, stop: Arc<AtomicBool>) {
    let period = Duration::from_secs_f64(BROADCAST_INTERVAL_MS / 1000.0);
    let mut last = Instant::now();
    while !stop.load(Ordering::Relaxed) {
        while let Ok((text, reply)) = inbox.try_recv() {
            if let Err(e) = gw.submit(&text) {
                let _ = reply.send(e);
            }
        }
        let now = Instant::now();
        let dt = now.duration_since(last).as_secs_f64() * 1000.0;
        last = now;
        for msg in gw.tick(dt) {
            let _ = outbox.send(msg);
        }
        std::thread::sleep(period.saturating_sub(now.elapsed()));
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| client(socket, state))
}

async fn client(socket: WebSocket, state: AppState) {
    let (mut sink, mut stream) = socket.split();
    let mut broadcasts = state.outbox.subscribe();
    let (reply_tx, mut replies) = mpsc::unbounded_channel::<String>();
    let writer = tokio::spawn(async move {
        loop {
            let msg = tokio::select! {
                m = broadcasts.recv() => match m {
                    Ok(m) => m,
                    Err(broadcast::error::RecvError::Lagged(n)) => {
                        tracing::warn!(skipped = n, "slow client");
                        continue;
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                },
                r = replies.recv() => match r {
                    Some(r) => r,
                    None => break,
                },
            };
            if sink.send(Message::Text(msg)).await.is_err() {
                break;
            }
        }
    });
    while let Some(Ok(msg)) = stream.next().await {
        match msg {
            Message::Text(text) => {
                if state.inbox.try_send((text, reply_tx.clone())).is_err() {
                    let _ = reply_tx.send(error_message("server busy"));
                }
            }
            Message::Close(_) => break,
            _ => {}
        }
    }
    writer.abort();
}

pub async fn run(mut opts: ServeOptions) -> Result<()> {
    let gw = build_gateway(&mut opts)?;
    let (outbox, _) = broadcast::channel(1024);
    let (inbox, inbox_rx) = mpsc::channel(DEFAULT_QUEUE_CAPACITY);
    let stop = Arc::new(AtomicBool::new(false));
    let worker = {
        let (outbox, stop) = (outbox.clone(), stop.clone());
        std::thread::spawn(move || runtime_loop(gw, inbox_rx, outbox, stop))
    };

    let app = Router::new().route("/ws", get(ws_handler)).with_state(AppState { inbox, outbox });
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", opts.port)).await.with_context(|| format!("binding port {}", opts.port))?;
    println!("listening on ws://{}/ws", listener.local_addr()?);
    tracing::info!(backend = if opts.device.is_some() { "serial" } else { "sim" }, "gateway up");

    let until = async {
        match opts.duration_s {
            Some(s) => tokio::time::sleep(Duration::from_secs_f64(s)).await,
            None => {
                let _ = tokio::signal::ctrl_c().await;
            }
        }
    };
    tokio::select! {
        r = axum::serve(listener, app) => r?,
        _ = until => {}
    }
    stop.store(true, Ordering::Relaxed);
    let _ = worker.join();
    Ok(())
}
