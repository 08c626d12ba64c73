//! Minimal HTTP abstraction so the clients can run against a real network,
//! a test double, or nothing at all.

use std::time::Duration;

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Empty,
    Multipart {
        fields: Vec<(String, String)>,
        file_field: String,
        file_name: String,
        file: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HttpRequest {
    pub method: &'static str,
    pub url: String,
    pub query: Vec<(String, String)>,
    pub body: Body,
}

impl HttpRequest {
    pub fn get(url: impl Into<String>) -> HttpRequest {
        HttpRequest {
            method: "GET",
            url: url.into(),
            query: Vec::new(),
            body: Body::Empty,
        }
    }

    pub fn post(url: impl Into<String>, body: Body) -> HttpRequest {
        HttpRequest {
            method: "POST",
            url: url.into(),
            query: Vec::new(),
            body,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<String>) -> HttpRequest {
        self.query.push((key.to_string(), value.into()));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

pub trait Transport: Send + Sync {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, String>;

    /// False for transports that must never touch the network.
    fn is_networked(&self) -> bool {
        true
    }
}

/// Blocking reqwest-backed transport.
pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(timeout: Duration) -> Result<ReqwestTransport, String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("namegender/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| e.to_string())?;
        Ok(ReqwestTransport { client })
    }
}

impl Transport for ReqwestTransport {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, String> {
        let builder = match request.method {
            "POST" => self.client.post(&request.url),
            _ => self.client.get(&request.url),
        };
        let builder = builder.query(&request.query);
        let builder = match &request.body {
            Body::Empty => builder,
            Body::Multipart {
                fields,
                file_field,
                file_name,
                file,
            } => {
                let mut form = reqwest::blocking::multipart::Form::new();
                for (k, v) in fields {
                    form = form.text(k.clone(), v.clone());
                }
                let part = reqwest::blocking::multipart::Part::bytes(file.clone())
                    .file_name(file_name.clone());
                builder.multipart(form.part(file_field.clone(), part))
            }
        };
        let response = builder.send().map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        let body = response.bytes().map_err(|e| e.to_string())?.to_vec();
        Ok(HttpResponse { status, body })
    }
}

/// Transport used in replay mode; every request fails.
pub struct NoNetwork;

impl Transport for NoNetwork {
    fn send(&self, request: &HttpRequest) -> Result<HttpResponse, String> {
        Err(format!("network access forbidden ({} {})", request.method, request.url))
    }

    fn is_networked(&self) -> bool {
        false
    }
}
