//! Single-client WebSocket server driving a [`LiveSession`] in real time.

use std::io;
use std::net::SocketAddr;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use riskhud_core::session::live::{LiveSession, QuizAnswer, ServerMessage};
use riskhud_core::session::{SessionError, SessionLog};
use thiserror::Error;
use tokio::net::{TcpListener, TcpStream};
use tokio::time::{Instant, MissedTickBehavior};
use tokio_tungstenite::tungstenite::handshake::server::{ErrorResponse, Request, Response};
use tokio_tungstenite::tungstenite::http::StatusCode;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::WebSocketStream;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Ending {
    Completed,
    /// The session stopped early; the reason was also sent in `end`.
    Aborted(String),
}

#[derive(Debug, Clone)]
pub struct ServeReport {
    pub peer: SocketAddr,
    pub ending: Ending,
    pub log: SessionLog,
    pub answers: Vec<QuizAnswer>,
}

pub struct Server {
    listener: TcpListener,
}

impl Server {
    pub async fn bind(addr: SocketAddr) -> Result<Server, ServeError> {
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| ServeError::Bind { addr, source })?;
        Ok(Server { listener })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Wait for a cockpit client, then run `session` against it until the
    /// session ends, the client leaves or it breaks protocol. Clients that
    /// connect while a session is running are turned away with 409.
    pub async fn run(self, session: LiveSession) -> Result<ServeReport, ServeError> {
        let (ws, peer) = loop {
            let (tcp, peer) = self.listener.accept().await?;
            // a failed handshake (e.g. a plain HTTP probe) does not consume the slot
            if let Ok(ws) = tokio_tungstenite::accept_async(tcp).await {
                break (ws, peer);
            }
        };
        let rejector = tokio::spawn(reject_all(self.listener));
        let (ending, session) = drive(ws, session).await;
        rejector.abort();
        let answers = session.answers().to_vec();
        Ok(ServeReport {
            peer,
            ending,
            log: session.into_log(),
            answers,
        })
    }
}

#[allow(clippy::result_large_err)]
fn busy(_: &Request, _: Response) -> Result<Response, ErrorResponse> {
    let mut resp = ErrorResponse::new(Some("a session is already running".into()));
    *resp.status_mut() = StatusCode::CONFLICT;
    Err(resp)
}

async fn reject_all(listener: TcpListener) {
    while let Ok((tcp, _)) = listener.accept().await {
        tokio::spawn(async move {
            let _ = tokio_tungstenite::accept_hdr_async(tcp, busy).await;
        });
    }
}

async fn send_all(ws: &mut WebSocketStream<TcpStream>, msgs: &[ServerMessage]) -> Result<(), ServeError> {
    for m in msgs {
        ws.feed(Message::text(m.to_json())).await.map_err(to_io)?;
    }
    ws.flush().await.map_err(to_io)?;
    Ok(())
}

fn to_io(e: tokio_tungstenite::tungstenite::Error) -> io::Error {
    match e {
        tokio_tungstenite::tungstenite::Error::Io(e) => e,
        other => io::Error::other(other),
    }
}

async fn abort(ws: &mut WebSocketStream<TcpStream>, reason: String) -> Ending {
    let end = ServerMessage::End {
        reason: Some(reason.clone()),
    };
    let _ = send_all(ws, &[end]).await;
    let _ = ws.close(None).await;
    Ending::Aborted(reason)
}

async fn drive(mut ws: WebSocketStream<TcpStream>, mut session: LiveSession) -> (Ending, LiveSession) {
    if let Err(e) = send_all(&mut ws, &[session.hello()]).await {
        return (Ending::Aborted(format!("send failed: {e}")), session);
    }
    let period = Duration::from_secs_f64(1.0 / session.config().tick_rate);
    let start = Instant::now();
    let mut clock = tokio::time::interval_at(start, period);
    clock.set_missed_tick_behavior(MissedTickBehavior::Delay);

    loop {
        tokio::select! {
            incoming = ws.next() => {
                let now = start.elapsed().as_secs_f64();
                let reply = match incoming {
                    Some(Ok(Message::Text(text))) => session.receive_text(text.as_str(), now),
                    Some(Ok(Message::Binary(_))) => Err(SessionError::Protocol("binary frames are not supported".into())),
                    Some(Ok(Message::Close(_))) | None => {
                        return (Ending::Aborted("client disconnected".into()), session);
                    }
                    Some(Ok(_)) => Ok(Vec::new()),
                    Some(Err(e)) => return (Ending::Aborted(format!("connection error: {e}")), session),
                };
                match reply {
                    Ok(msgs) => {
                        if let Err(e) = send_all(&mut ws, &msgs).await {
                            return (Ending::Aborted(format!("send failed: {e}")), session);
                        }
                    }
                    Err(e) => return (abort(&mut ws, e.to_string()).await, session),
                }
            }
            _ = clock.tick() => {
                let msgs = match session.tick(start.elapsed().as_secs_f64()) {
                    Ok(msgs) => msgs,
                    Err(e) => return (abort(&mut ws, e.to_string()).await, session),
                };
                if let Err(e) = send_all(&mut ws, &msgs).await {
                    return (Ending::Aborted(format!("send failed: {e}")), session);
                }
                if session.is_finished() {
                    let _ = ws.close(None).await;
                    return (Ending::Completed, session);
                }
            }
        }
    }
}
