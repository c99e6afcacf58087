//! Request/response pairing, header augmentation, operation binding and
//! subscription/notification linking.

use std::collections::BTreeMap;

use crate::capture::{HttpMessage, MessageDirection};
use crate::json::{parse_json, JsonValue};
use crate::openapi::{LookupOutcome, NoMatchReason, SpecIndex};
use crate::validate::{Finding, RuleId};

/// Top-level request body properties that announce a callback URI. The set
/// covers the NRF and common SBI subscription patterns and can be extended
/// per run.
pub const DEFAULT_CALLBACK_PROPERTIES: &[&str] = &[
    "nfStatusNotificationUri",
    "callbackReference",
    "notificationUri",
];

/// How a synthesized header value came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentationSource {
    /// Derived from the body bytes themselves.
    ContentSniff,
    /// The only content type the bound operation declares.
    SpecDefault,
    /// Nothing could be synthesized; the header stays absent.
    Unrecoverable,
}

impl AugmentationSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            AugmentationSource::ContentSniff => "content-sniff",
            AugmentationSource::SpecDefault => "spec-default",
            AugmentationSource::Unrecoverable => "unrecoverable",
        }
    }
}

/// Record of one synthesized (or unrecoverable) header.
#[derive(Debug, Clone)]
pub struct AugmentationNote {
    pub side: MessageDirection,
    pub header: String,
    pub source: AugmentationSource,
    pub value: Option<String>,
}

/// Which operation a request was bound to.
#[derive(Debug, Clone)]
pub struct BoundOperation {
    /// Index into [`SpecIndex::entries`].
    pub entry_index: usize,
    pub method: String,
    pub operation_id: String,
    pub base_path: String,
    pub template: String,
    pub path_params: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VersionStatus {
    Ok,
    Unsupported { api_name: String, found: String, expected: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// The linked exchange created the subscription this one notifies.
    Subscription,
    /// The linked exchange is a notification for this subscription.
    Notification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeLink {
    pub other: usize,
    pub kind: LinkKind,
}

/// One correlated request/response pair (either side may be missing when
/// the capture is incomplete).
#[derive(Debug)]
pub struct HttpExchange {
    pub request: Option<HttpMessage>,
    pub response: Option<HttpMessage>,
    pub bound: Option<BoundOperation>,
    pub version_status: VersionStatus,
    pub augmentations: Vec<AugmentationNote>,
    pub links: Vec<ExchangeLink>,
    /// Findings raised during correlation (path/method/version problems).
    pub findings: Vec<Finding>,
    pub notes: Vec<String>,
}

impl HttpExchange {
    fn of_request(request: HttpMessage) -> HttpExchange {
        HttpExchange {
            request: Some(request),
            response: None,
            bound: None,
            version_status: VersionStatus::Ok,
            augmentations: Vec::new(),
            links: Vec::new(),
            findings: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn of_response(response: HttpMessage) -> HttpExchange {
        HttpExchange {
            request: None,
            response: Some(response),
            bound: None,
            version_status: VersionStatus::Ok,
            augmentations: Vec::new(),
            links: Vec::new(),
            findings: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Frame number that anchors the exchange in reports.
    pub fn anchor_frame(&self) -> u32 {
        self.request
            .as_ref()
            .or(self.response.as_ref())
            .map(|m| m.first_frame)
            .unwrap_or(0)
    }

    pub fn request_method(&self) -> Option<&str> {
        self.request.as_ref()?.headers.get(":method")
    }

    pub fn request_path(&self) -> Option<&str> {
        self.request.as_ref()?.headers.get(":path")
    }

    pub fn response_status(&self) -> Option<u16> {
        self.response
            .as_ref()?
            .headers
            .get(":status")?
            .parse()
            .ok()
    }
}

/// Pairs messages into exchanges: one per (tcp stream, h2 stream).
pub fn pair_exchanges(messages: Vec<HttpMessage>) -> Vec<HttpExchange> {
    let mut exchanges: Vec<HttpExchange> = Vec::new();
    let mut open: BTreeMap<(u32, u32), usize> = BTreeMap::new();

    for message in messages {
        let key = (message.tcp_stream_id, message.h2_stream_id);
        match message.direction {
            MessageDirection::Request => match open.get(&key) {
                Some(&idx) if exchanges[idx].request.is_none() => {
                    exchanges[idx].request = Some(message);
                }
                Some(_) | None => {
                    let idx = exchanges.len();
                    exchanges.push(HttpExchange::of_request(message));
                    open.insert(key, idx);
                }
            },
            MessageDirection::Response => match open.get(&key) {
                Some(&idx) if exchanges[idx].response.is_none() => {
                    exchanges[idx].response = Some(message);
                }
                Some(_) | None => {
                    let idx = exchanges.len();
                    exchanges.push(HttpExchange::of_response(message));
                    open.insert(key, idx);
                }
            },
        }
    }

    for exchange in &mut exchanges {
        match (&exchange.request, &exchange.response) {
            (Some(_), None) => {
                exchange
                    .notes
                    .push("request without a captured response".to_string());
            }
            (None, Some(response)) => {
                exchange.findings.push(
                    Finding::new(
                        RuleId::HeadersIncomplete,
                        "",
                        "response without a captured request; no operation can be bound",
                    )
                    .with_frame(response.first_frame),
                );
            }
            _ => {}
        }
    }

    exchanges.sort_by_key(|e| {
        (
            e.anchor_frame(),
            e.request.as_ref().or(e.response.as_ref()).map(|m| m.h2_stream_id),
        )
    });
    exchanges
}

/// Binds the exchange to an operation via the path lookup.
pub fn match_operation(exchange: &mut HttpExchange, index: &SpecIndex) {
    let Some(request) = &exchange.request else {
        return;
    };
    let frame = request.first_frame;
    let (Some(method), Some(path)) = (
        request.headers.get(":method"),
        request.headers.get(":path"),
    ) else {
        exchange.findings.push(
            Finding::new(
                RuleId::HeadersIncomplete,
                "",
                "request is missing :method or :path; headers were lost to compression",
            )
            .with_frame(frame),
        );
        return;
    };
    match index.lookup_operation(method, path) {
        LookupOutcome::Match(m) => {
            let entry_index = index
                .entries()
                .iter()
                .position(|e| std::ptr::eq(e, m.entry))
                .unwrap_or_default();
            exchange.bound = Some(BoundOperation {
                entry_index,
                method: method.to_ascii_uppercase(),
                operation_id: m.operation.operation_id.clone(),
                base_path: m.entry.base_path.clone(),
                template: m.entry.matcher.template.clone(),
                path_params: m.path_params,
            });
        }
        LookupOutcome::NoMatch(NoMatchReason::UnknownBasePath) => {
            exchange.findings.push(
                Finding::new(
                    RuleId::UnknownPath,
                    "",
                    format!("no loaded API declares a base path matching {path:?}"),
                )
                .with_frame(frame),
            );
        }
        LookupOutcome::NoMatch(NoMatchReason::UnknownPath) => {
            exchange.findings.push(
                Finding::new(
                    RuleId::UnknownPath,
                    "",
                    format!("no path template matches {path:?}"),
                )
                .with_frame(frame),
            );
        }
        LookupOutcome::NoMatch(NoMatchReason::MethodNotAllowed { allowed }) => {
            exchange.findings.push(
                Finding::new(
                    RuleId::MethodNotAllowed,
                    "",
                    format!(
                        "method {method} is not declared for this path (declared: {})",
                        allowed.join(", ")
                    ),
                )
                .with_frame(frame),
            );
        }
        LookupOutcome::NoMatch(NoMatchReason::UnsupportedVersion {
            api_name,
            found,
            expected,
        }) => {
            exchange.findings.push(
                Finding::new(
                    RuleId::UnsupportedApiVersion,
                    "",
                    format!(
                        "API {api_name} is used at version {found}, loaded specification is {expected}; payload validation skipped"
                    ),
                )
                .with_frame(frame),
            );
            exchange.version_status = VersionStatus::Unsupported {
                api_name,
                found,
                expected,
            };
        }
    }
}

/// Fills in missing Content-Type headers and flags missing :status.
/// Synthesized values never overwrite decoded ones, and running the pass
/// twice changes nothing.
pub fn augment_headers(exchange: &mut HttpExchange, index: &SpecIndex) {
    let bound = exchange.bound.clone();
    for side in [MessageDirection::Request, MessageDirection::Response] {
        let message = match side {
            MessageDirection::Request => exchange.request.as_mut(),
            MessageDirection::Response => exchange.response.as_mut(),
        };
        let Some(message) = message else { continue };

        if side == MessageDirection::Response && message.headers.get(":status").is_none() {
            let frame = message.first_frame;
            exchange.findings.push(
                Finding::new(
                    RuleId::HeadersIncomplete,
                    "",
                    "response :status was lost to compression and cannot be synthesized",
                )
                .with_frame(frame),
            );
            exchange.augmentations.push(AugmentationNote {
                side,
                header: ":status".to_string(),
                source: AugmentationSource::Unrecoverable,
                value: None,
            });
        }

        if message.body.is_empty() || message.headers.get("content-type").is_some() {
            continue;
        }
        let body_is_json = std::str::from_utf8(&message.body)
            .ok()
            .and_then(|text| parse_json(text).ok())
            .is_some();
        let synthesized = if body_is_json {
            Some(("application/json".to_string(), AugmentationSource::ContentSniff))
        } else {
            declared_single_content_type(&bound, side, index)
                .map(|ct| (ct, AugmentationSource::SpecDefault))
        };
        if let Some((value, source)) = synthesized {
            message
                .headers
                .fields
                .push(("content-type".to_string(), value.clone()));
            exchange.augmentations.push(AugmentationNote {
                side,
                header: "content-type".to_string(),
                source,
                value: Some(value),
            });
        }
    }
}

/// The single content type an operation declares for one side, if exactly
/// one is declared.
fn declared_single_content_type(
    bound: &Option<BoundOperation>,
    side: MessageDirection,
    index: &SpecIndex,
) -> Option<String> {
    let bound = bound.as_ref()?;
    let entry = index.entries().get(bound.entry_index)?;
    let operation = entry.operations.get(&bound.method)?;
    match side {
        MessageDirection::Request => {
            if operation.request_body.len() == 1 {
                operation.request_body.keys().next().cloned()
            } else {
                None
            }
        }
        MessageDirection::Response => {
            // Without a decoded :status the declared set is ambiguous unless
            // every response agrees on a single content type.
            let mut types: Vec<&String> = operation
                .responses
                .iter()
                .flat_map(|r| r.content.keys())
                .collect();
            types.sort();
            types.dedup();
            if types.len() == 1 {
                Some(types[0].clone())
            } else {
                None
            }
        }
    }
}

/// A subscription-creating exchange and where its notifications will go.
#[derive(Debug, Clone)]
pub struct SubscriptionRecord {
    pub exchange_index: usize,
    /// (authority, path) the callback URI denotes.
    pub callback: (String, String),
    /// Location header of the subscription response, when present.
    pub resource_location: Option<String>,
}

/// Links subscription-creating exchanges to later notification requests
/// aimed at the registered callback URI. Links are symmetric.
pub fn link_subscriptions(
    exchanges: &mut [HttpExchange],
    callback_properties: &[&str],
) -> Vec<SubscriptionRecord> {
    let mut records: Vec<SubscriptionRecord> = Vec::new();
    let mut by_callback: BTreeMap<(String, String), usize> = BTreeMap::new();

    for idx in 0..exchanges.len() {
        // A later request to a registered callback is a notification.
        if let Some(request) = &exchanges[idx].request {
            let authority = request
                .headers
                .get(":authority")
                .or_else(|| request.headers.get("host"));
            let path = request.headers.get(":path");
            if let (Some(authority), Some(path)) = (authority, path) {
                let key = (
                    authority.to_ascii_lowercase(),
                    path.split(['?', '#']).next().unwrap_or("").to_string(),
                );
                if let Some(&subscription_idx) = by_callback.get(&key) {
                    exchanges[idx].links.push(ExchangeLink {
                        other: subscription_idx,
                        kind: LinkKind::Subscription,
                    });
                    exchanges[subscription_idx].links.push(ExchangeLink {
                        other: idx,
                        kind: LinkKind::Notification,
                    });
                }
            }
        }

        if let Some(callback) = callback_uri_of(&exchanges[idx], callback_properties) {
            let resource_location = exchanges[idx]
                .response
                .as_ref()
                .and_then(|r| r.headers.get("location"))
                .map(str::to_string);
            by_callback.insert(callback.clone(), idx);
            records.push(SubscriptionRecord {
                exchange_index: idx,
                callback,
                resource_location,
            });
        }
    }
    records
}

fn callback_uri_of(
    exchange: &HttpExchange,
    callback_properties: &[&str],
) -> Option<(String, String)> {
    let request = exchange.request.as_ref()?;
    let text = std::str::from_utf8(&request.body).ok()?;
    let value = parse_json(text).ok()?;
    let JsonValue::Object(members) = &value else {
        return None;
    };
    for (key, member) in members {
        if callback_properties.contains(&key.as_str()) {
            if let JsonValue::String(uri) = member {
                return split_uri(uri);
            }
        }
    }
    None
}

/// "http://amf:80/cb/1" -> ("amf:80", "/cb/1")
fn split_uri(uri: &str) -> Option<(String, String)> {
    let rest = uri.split_once("://").map(|(_, r)| r).unwrap_or(uri);
    if rest.is_empty() {
        return None;
    }
    let (authority, path) = match rest.find('/') {
        Some(idx) => (&rest[..idx], &rest[idx..]),
        None => (rest, "/"),
    };
    if authority.is_empty() {
        return None;
    }
    Some((
        authority.to_ascii_lowercase(),
        path.split(['?', '#']).next().unwrap_or("/").to_string(),
    ))
}
