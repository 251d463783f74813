//! Minimal HTTP/1.0 GET over a plain TCP stream.
//!
//! The remote factor database speaks plain HTTP, and the toolkit refuses to
//! grow a TLS stack for one optional lookup path: `https://` URLs are
//! rejected with a pointer to this policy. Requests are HTTP/1.0 with
//! `Connection: close`, so the body is simply everything after the header
//! block and chunked encoding never appears.

use std::io::{Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::Duration;

use upn_core::oracle::HttpGetter;

pub struct TcpHttpGetter {
    timeout: Duration,
}

impl Default for TcpHttpGetter {
    fn default() -> Self {
        TcpHttpGetter { timeout: Duration::from_secs(15) }
    }
}

impl HttpGetter for TcpHttpGetter {
    fn get(&self, url: &str) -> Result<String, String> {
        let rest = url
            .strip_prefix("http://")
            .ok_or_else(|| {
                if url.starts_with("https://") {
                    "https is not supported; configure a plain http:// base URL".to_string()
                } else {
                    format!("unsupported URL scheme in {url}")
                }
            })?;
        let (authority, path) = match rest.find('/') {
            Some(i) => (&rest[..i], &rest[i..]),
            None => (rest, "/"),
        };
        let (host, port) = match authority.rsplit_once(':') {
            Some((h, p)) => {
                (h, p.parse::<u16>().map_err(|_| format!("bad port in {url}"))?)
            }
            None => (authority, 80),
        };

        let addr = (host, port)
            .to_socket_addrs()
            .map_err(|e| format!("resolving {host}: {e}"))?
            .next()
            .ok_or_else(|| format!("no address for {host}"))?;
        let mut stream = TcpStream::connect_timeout(&addr, self.timeout)
            .map_err(|e| format!("connecting {host}:{port}: {e}"))?;
        stream.set_read_timeout(Some(self.timeout)).map_err(|e| e.to_string())?;
        stream.set_write_timeout(Some(self.timeout)).map_err(|e| e.to_string())?;

        let request = format!(
            "GET {path} HTTP/1.0\r\nHost: {host}\r\nUser-Agent: upn/{}\r\nConnection: close\r\n\r\n",
            crate::session::VERSION,
        );
        stream.write_all(request.as_bytes()).map_err(|e| format!("send: {e}"))?;

        let mut raw = Vec::new();
        stream.read_to_end(&mut raw).map_err(|e| format!("recv: {e}"))?;
        let text = String::from_utf8_lossy(&raw);

        let Some((head, body)) = text.split_once("\r\n\r\n") else {
            return Err("malformed HTTP response: no header terminator".into());
        };
        let status_line = head.lines().next().unwrap_or_default();
        let mut parts = status_line.split_whitespace();
        let _version = parts.next();
        let code = parts.next().unwrap_or("");
        if code != "200" {
            return Err(format!("HTTP status {code} from {host}"));
        }
        Ok(body.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn https_and_garbage_schemes_are_rejected() {
        let g = TcpHttpGetter::default();
        let err = g.get("https://factordb.com/api?query=6").unwrap_err();
        assert!(err.contains("https is not supported"));
        let err = g.get("ftp://x/api").unwrap_err();
        assert!(err.contains("unsupported URL scheme"));
    }

    #[test]
    fn serves_a_local_response() {
        use std::net::TcpListener;
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        let server = std::thread::spawn(move || {
            let (mut sock, _) = listener.accept().unwrap();
            let mut buf = [0u8; 1024];
            let n = sock.read(&mut buf).unwrap();
            let req = String::from_utf8_lossy(&buf[..n]).to_string();
            sock.write_all(
                b"HTTP/1.0 200 OK\r\nContent-Type: application/json\r\n\r\n{\"ok\":true}",
            )
            .unwrap();
            req
        });
        let g = TcpHttpGetter::default();
        let body = g.get(&format!("http://127.0.0.1:{port}/api?query=6")).unwrap();
        assert_eq!(body, "{\"ok\":true}");
        let req = server.join().unwrap();
        assert!(req.starts_with("GET /api?query=6 HTTP/1.0\r\n"));
        assert!(req.contains("Connection: close"));
    }

    #[test]
    fn non_200_statuses_become_errors() {
        use std::net::TcpListener;
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let port = listener.local_addr().unwrap().port();
        std::thread::spawn(move || {
            let (mut sock, _) = listener.accept().unwrap();
            let mut buf = [0u8; 512];
            let _ = sock.read(&mut buf).unwrap();
            sock.write_all(b"HTTP/1.0 404 Not Found\r\n\r\nmissing").unwrap();
        });
        let g = TcpHttpGetter::default();
        let err = g.get(&format!("http://127.0.0.1:{port}/nope")).unwrap_err();
        assert!(err.contains("404"), "{err}");
    }
}
