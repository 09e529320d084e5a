//! Wire protocol: JSON messages, each preceded by its byte length as a
//! big-endian `u32`, over one bidirectional stream.

use std::io::{self, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{ControlSection, SessionOptions, SessionStore};
use crate::error::Error;
use crate::sweep::{SculptureMesh, SweepWarning};

pub const PROTOCOL_VERSION: u32 = 1;
pub const MAX_FRAME: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        version: u32,
    },
    Create {
        controls: Vec<ControlSection>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sections: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ring: Option<usize>,
    },
    Update {
        session: String,
        control: String,
        centroid: [f64; 3],
        vertices: [[f64; 3]; 4],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ServerMessage {
    Hello {
        version: u32,
        server: String,
    },
    /// `vertices`: little-endian `f32` triples; `indices`: little-endian
    /// `u32` triples; both base64.
    Mesh {
        session: String,
        revision: u64,
        /// Some update folded into this mesh was clamped to the floor.
        clamped: bool,
        vertex_count: usize,
        triangle_count: usize,
        vertices: String,
        indices: String,
    },
    Warning {
        session: String,
        code: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        control: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        area: Option<f64>,
        message: String,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session: Option<String>,
        code: String,
        message: String,
    },
}

pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::NotFound(_) => "not-found",
        Error::Immutable(_) => "immutable",
        Error::BadControls(_) => "bad-controls",
        Error::DegenerateControls(_) => "degenerate-controls",
        Error::BadResolution(_) => "bad-resolution",
        Error::Format(_) => "bad-message",
        _ => "internal",
    }
}

fn error_message(session: Option<&str>, e: &Error) -> ServerMessage {
    ServerMessage::Error { session: session.map(str::to_owned), code: error_code(e).into(), message: e.to_string() }
}

fn warning_message(session: &str, w: &SweepWarning) -> ServerMessage {
    match w {
        SweepWarning::Clamped { control, area } => ServerMessage::Warning {
            session: session.into(),
            code: "clamped".into(),
            control: Some(control.clone()),
            area: Some(*area),
            message: format!("control `{control}` was scaled up to the area floor {area}"),
        },
        SweepWarning::OpenSeam { max_mismatch } => ServerMessage::Warning {
            session: session.into(),
            code: "open-seam".into(),
            control: None,
            area: None,
            message: format!("seam left open, mismatch {max_mismatch:e}"),
        },
    }
}

pub fn mesh_message(session: &str, revision: u64, clamped: bool, mesh: &SculptureMesh) -> ServerMessage {
    let mut vb = Vec::with_capacity(12 * mesh.vertices.len());
    for p in &mesh.vertices {
        for x in [p.x, p.y, p.z] {
            vb.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }
    let mut ib = Vec::with_capacity(12 * mesh.triangles.len());
    for i in mesh.triangles.iter().flatten() {
        ib.extend_from_slice(&i.to_le_bytes());
    }
    ServerMessage::Mesh {
        session: session.into(),
        revision,
        clamped,
        vertex_count: mesh.vertices.len(),
        triangle_count: mesh.triangles.len(),
        vertices: STANDARD.encode(vb),
        indices: STANDARD.encode(ib),
    }
}

pub type DecodedMesh = (Vec<[f32; 3]>, Vec<[u32; 3]>);

/// Vertex and index buffers of a mesh message.
pub fn decode_mesh(msg: &ServerMessage) -> Result<DecodedMesh, Error> {
    let ServerMessage::Mesh { vertices, indices, vertex_count, triangle_count, .. } = msg else {
        return Err(Error::Format("not a mesh message".into()));
    };
    let bad = |e: base64::DecodeError| Error::Format(e.to_string());
    let vb = STANDARD.decode(vertices).map_err(bad)?;
    let ib = STANDARD.decode(indices).map_err(bad)?;
    if vb.len() != 12 * vertex_count || ib.len() != 12 * triangle_count {
        return Err(Error::Format("mesh buffers do not match their counts".into()));
    }
    let word = |b: &[u8]| <[u8; 4]>::try_from(b).unwrap();
    let verts = vb.chunks_exact(12).map(|c| [0, 4, 8].map(|o| f32::from_le_bytes(word(&c[o..o + 4])))).collect();
    let tris = ib.chunks_exact(12).map(|c| [0, 4, 8].map(|o| u32::from_le_bytes(word(&c[o..o + 4])))).collect();
    Ok((verts, tris))
}

/// Reads one frame; `None` on a clean end of stream.
pub fn read_frame(r: &mut impl Read) -> io::Result<Option<Vec<u8>>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let n = u32::from_be_bytes(len) as usize;
    if n > MAX_FRAME {
        return Err(io::Error::new(io::ErrorKind::InvalidData, format!("frame of {n} bytes exceeds the limit")));
    }
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)?;
    Ok(Some(buf))
}

pub fn write_frame(w: &mut impl Write, payload: &[u8]) -> io::Result<()> {
    let n = u32::try_from(payload.len())
        .ok()
        .filter(|&n| n as usize <= MAX_FRAME)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "frame too large"))?;
    w.write_all(&n.to_be_bytes())?;
    w.write_all(payload)?;
    w.flush()
}

pub fn send<T: Serialize>(w: &mut impl Write, msg: &T) -> io::Result<()> {
    write_frame(w, &serde_json::to_vec(msg).map_err(io::Error::other)?)
}

pub fn receive<T: for<'de> Deserialize<'de>>(r: &mut impl Read) -> io::Result<Option<T>> {
    match read_frame(r)? {
        None => Ok(None),
        Some(buf) => serde_json::from_slice(&buf).map(Some).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)),
    }
}

enum Inbound {
    Message(ClientMessage),
    Malformed(String),
}

/// Processes a burst of messages in arrival order. Updates to a session
/// take effect one by one; the session regenerates once, when the burst
/// ends or another kind of message arrives.
pub fn handle_burst(store: &SessionStore, burst: Vec<ClientMessage>) -> Vec<ServerMessage> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, bool)> = Vec::new();
    let flush = |pending: &mut Vec<(String, bool)>, out: &mut Vec<ServerMessage>| {
        for (id, clamped) in pending.drain(..) {
            let reply = store.get(&id).and_then(|s| {
                let mut s = s.lock().unwrap();
                let mesh = s.regenerate()?;
                Ok(mesh_message(&id, s.revision(), clamped, &mesh))
            });
            out.push(reply.unwrap_or_else(|e| error_message(Some(&id), &e)));
        }
    };
    for msg in burst {
        match msg {
            ClientMessage::Update { session, control, centroid, vertices } => {
                let applied = store.get(&session).and_then(|s| s.lock().unwrap().apply(&control, centroid, vertices));
                match applied {
                    Ok(a) => {
                        if a.clamped {
                            let w = SweepWarning::Clamped { control: control.clone(), area: a.area };
                            out.push(warning_message(&session, &w));
                        }
                        match pending.iter_mut().find(|p| p.0 == session) {
                            Some(p) => p.1 |= a.clamped,
                            None => pending.push((session, a.clamped)),
                        }
                    }
                    Err(e) => out.push(error_message(Some(&session), &e)),
                }
            }
            ClientMessage::Hello { version } => {
                flush(&mut pending, &mut out);
                if version != PROTOCOL_VERSION {
                    let e = Error::Format(format!("protocol version {version} is not supported"));
                    out.push(error_message(None, &e));
                } else {
                    out.push(ServerMessage::Hello { version: PROTOCOL_VERSION, server: "fels".into() });
                }
            }
            ClientMessage::Create { controls, sections, ring } => {
                flush(&mut pending, &mut out);
                let d = SessionOptions::default();
                let opts = SessionOptions { sections: sections.unwrap_or(d.sections), ring: ring.unwrap_or(d.ring) };
                match store.create(controls, opts) {
                    Ok((id, mesh, warnings)) => {
                        out.extend(warnings.iter().map(|w| warning_message(&id, w)));
                        let clamped = !warnings.is_empty();
                        out.push(mesh_message(&id, 1, clamped, &mesh));
                    }
                    Err(e) => out.push(error_message(None, &e)),
                }
            }
        }
    }
    flush(&mut pending, &mut out);
    out
}

/// Serves one connection until the peer closes it. Messages that queue up
/// while a burst is processed form the next burst.
pub fn handle_connection(stream: TcpStream, store: Arc<SessionStore>) -> io::Result<()> {
    let mut reader = stream.try_clone()?;
    let mut writer = stream;
    let (tx, rx) = mpsc::channel();
    let pump = thread::spawn(move || loop {
        let item = match read_frame(&mut reader) {
            Ok(Some(buf)) => match serde_json::from_slice::<ClientMessage>(&buf) {
                Ok(m) => Inbound::Message(m),
                Err(e) => Inbound::Malformed(e.to_string()),
            },
            Ok(None) => break,
            Err(e) => {
                let _ = tx.send(Inbound::Malformed(e.to_string()));
                break;
            }
        };
        if tx.send(item).is_err() {
            break;
        }
    });
    while let Ok(first) = rx.recv() {
        let mut items = vec![first];
        items.extend(rx.try_iter());
        let mut burst = Vec::new();
        let mut replies = Vec::new();
        for item in items {
            match item {
                Inbound::Message(m) => burst.push(m),
                Inbound::Malformed(reason) => {
                    replies.extend(handle_burst(&store, std::mem::take(&mut burst)));
                    replies.push(error_message(None, &Error::Format(reason)));
                }
            }
        }
        replies.extend(handle_burst(&store, burst));
        for r in &replies {
            send(&mut writer, r)?;
        }
    }
    let _ = pump.join();
    Ok(())
}

/// Accepts connections forever, one thread each, all sharing `store`.
pub fn serve(listener: TcpListener, store: Arc<SessionStore>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let store = store.clone();
        thread::spawn(move || {
            let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
            log::info!("session client connected: {peer}");
            if let Err(e) = handle_connection(stream, store) {
                log::warn!("connection {peer} ended: {e}");
            }
        });
    }
    Ok(())
}

/// Blocking client for tests and tools.
pub struct Client {
    stream: TcpStream,
}

impl Client {
    pub fn connect(addr: impl std::net::ToSocketAddrs) -> io::Result<Self> {
        Ok(Self { stream: TcpStream::connect(addr)? })
    }

    pub fn send(&mut self, msg: &ClientMessage) -> io::Result<()> {
        send(&mut self.stream, msg)
    }

    pub fn receive(&mut self) -> io::Result<ServerMessage> {
        receive(&mut self.stream)?
            .ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "server closed the stream"))
    }

    /// Receives until a mesh or error arrives, returning everything read.
    pub fn receive_until_mesh(&mut self) -> io::Result<Vec<ServerMessage>> {
        let mut got = Vec::new();
        loop {
            let m = self.receive()?;
            let done = matches!(m, ServerMessage::Mesh { .. } | ServerMessage::Error { .. });
            got.push(m);
            if done {
                return Ok(got);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::demo_controls;

    fn create() -> ClientMessage {
        ClientMessage::Create { controls: demo_controls(), sections: Some(32), ring: Some(8) }
    }

    #[test]
    fn framing() {
        let mut buf = Vec::new();
        write_frame(&mut buf, b"{}").unwrap();
        assert_eq!(buf, [0, 0, 0, 2, b'{', b'}']);
        let mut r = &buf[..];
        assert_eq!(read_frame(&mut r).unwrap().unwrap(), b"{}");
        assert_eq!(read_frame(&mut r).unwrap(), None);
        let mut short = &buf[..4];
        assert!(read_frame(&mut short).is_err());
    }

    #[test]
    fn message_shapes() {
        let hello: ClientMessage = serde_json::from_str(r#"{"kind":"hello","version":1}"#).unwrap();
        assert_eq!(hello, ClientMessage::Hello { version: 1 });
        assert!(serde_json::from_str::<ClientMessage>(r#"{"kind":"mesh"}"#).is_err());
        let m = serde_json::to_value(create()).unwrap();
        assert_eq!(m["kind"], "create");
        assert_eq!(m["controls"][2]["role"], "yellow");
    }

    #[test]
    fn burst_coalesces_updates() {
        let store = SessionStore::new();
        let replies = handle_burst(&store, vec![ClientMessage::Hello { version: 1 }, create()]);
        assert!(matches!(replies[0], ServerMessage::Hello { .. }));
        let ServerMessage::Mesh { session, triangle_count, .. } = &replies[1] else { panic!("{replies:?}") };
        assert_eq!(*triangle_count, 2 * 32 * 8);
        let o = demo_controls()[1].clone();
        let step = |dz: f64| ClientMessage::Update {
            session: session.clone(),
            control: "c1".into(),
            centroid: o.centroid,
            vertices: o.vertices.map(|p| [p[0], p[1], p[2] * dz]),
        };
        let replies = handle_burst(&store, vec![step(1.1), step(1.2), step(0.01), step(1.3)]);
        let kinds: Vec<&str> = replies
            .iter()
            .map(|r| match r {
                ServerMessage::Mesh { .. } => "mesh",
                ServerMessage::Warning { .. } => "warning",
                _ => "other",
            })
            .collect();
        assert_eq!(kinds, ["warning", "mesh"]);
        let ServerMessage::Mesh { revision, clamped, .. } = &replies[1] else { unreachable!() };
        assert_eq!((*revision, *clamped), (2, true));
        let s = store.get(session).unwrap();
        let last = s.lock().unwrap().controls()[1].clone();
        assert!((last.vertices[2][2] - o.vertices[2][2] * 1.3).abs() < 1e-12);
    }

    #[test]
    fn errors_are_reported() {
        let store = SessionStore::new();
        let mut bad = demo_controls();
        bad[0].role = super::super::Role::Yellow;
        let replies = handle_burst(&store, vec![ClientMessage::Create { controls: bad, sections: None, ring: None }]);
        assert!(matches!(&replies[0], ServerMessage::Error { code, .. } if code == "bad-controls"));
        let o = demo_controls()[0].clone();
        let upd = ClientMessage::Update {
            session: "nope".into(),
            control: "c0".into(),
            centroid: o.centroid,
            vertices: o.vertices,
        };
        let replies = handle_burst(&store, vec![upd]);
        assert!(matches!(&replies[0], ServerMessage::Error { code, .. } if code == "not-found"));
    }

    #[test]
    fn over_tcp() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let store = Arc::new(SessionStore::new());
        thread::spawn(move || serve(listener, store));
        let mut c = Client::connect(addr).unwrap();
        c.send(&ClientMessage::Hello { version: 1 }).unwrap();
        assert!(matches!(c.receive().unwrap(), ServerMessage::Hello { version: 1, .. }));
        c.send(&create()).unwrap();
        let got = c.receive_until_mesh().unwrap();
        let mesh = got.last().unwrap();
        let (v, t) = decode_mesh(mesh).unwrap();
        assert_eq!((v.len(), t.len()), (32 * 8, 2 * 32 * 8));
        write_frame(&mut c.stream, b"not json").unwrap();
        assert!(matches!(c.receive().unwrap(), ServerMessage::Error { code, .. } if code == "bad-message"));
    }
}
