use proptest::prelude::*;
use quizwright_core::protocol::{
    decode, encode, ErrorCode, EventKind, PresentedChoice, PresentedQuestion, Role, SessionEvent,
    SessionState, SessionSummary, WireMessage, PROTOCOL_VERSION,
};
use quizwright_core::quizbank::{Percent, QuestionKind};

fn s() -> impl Strategy<Value = String> {
    any::<String>().prop_map(|s| s.chars().take(24).collect())
}

fn percent() -> impl Strategy<Value = Percent> {
    (0u32..=10_000).prop_map(Percent::from_hundredths)
}

fn question() -> impl Strategy<Value = PresentedQuestion> {
    (
        s(),
        any::<bool>(),
        1u32..10,
        s(),
        prop::collection::vec((s(), s()), 0..4),
    )
        .prop_map(|(id, multi, points, text, ch)| PresentedQuestion {
            id,
            kind: if multi {
                QuestionKind::Multi
            } else {
                QuestionKind::Single
            },
            points,
            text,
            choices: ch
                .into_iter()
                .map(|(id, text)| PresentedChoice { id, text })
                .collect(),
        })
}

fn state() -> impl Strategy<Value = SessionState> {
    prop_oneof![
        Just(SessionState::Registered),
        Just(SessionState::InProgress),
        Just(SessionState::Completed)
    ]
}

fn message() -> impl Strategy<Value = WireMessage> {
    let role = prop_oneof![Just(Role::Student), Just(Role::Admin), Just(Role::Monitor)];
    let kind = prop_oneof![
        Just(EventKind::Registered),
        Just(EventKind::Started),
        Just(EventKind::Answered),
        Just(EventKind::Finished)
    ];
    let code = prop_oneof![
        Just(ErrorCode::Auth),
        Just(ErrorCode::State),
        Just(ErrorCode::UnknownSession),
        Just(ErrorCode::UnknownQuestion),
        Just(ErrorCode::Malformed),
        Just(ErrorCode::Version)
    ];
    prop_oneof![
        role.prop_map(|role| WireMessage::Hello {
            role,
            protocol_version: PROTOCOL_VERSION
        }),
        s().prop_map(|server_version| WireMessage::Welcome { server_version }),
        (s(), s()).prop_map(|(user_id, password)| WireMessage::Auth { user_id, password }),
        Just(WireMessage::Ack),
        (s(), any::<u32>(), s()).prop_map(|(name, year_of_study, subject)| WireMessage::Register {
            name,
            year_of_study,
            subject
        }),
        (s(), s()).prop_map(|(session_id, test_id)| WireMessage::Session {
            session_id,
            test_id
        }),
        s().prop_map(|session_id| WireMessage::Start { session_id }),
        (s(), prop::collection::vec(question(), 0..4))
            .prop_map(|(test_id, questions)| WireMessage::Test { test_id, questions }),
        (s(), s(), prop::collection::vec(s(), 0..4)).prop_map(
            |(session_id, question_id, selected)| WireMessage::Answer {
                session_id,
                question_id,
                selected
            }
        ),
        s().prop_map(|session_id| WireMessage::Finish { session_id }),
        (any::<u32>(), any::<u32>(), percent()).prop_map(|(points, max_points, percent)| {
            WireMessage::Result {
                points,
                max_points,
                percent,
            }
        }),
        Just(WireMessage::ListSessions),
        prop::collection::vec(
            (
                s(),
                s(),
                s(),
                state(),
                0usize..50,
                prop::option::of(percent())
            )
                .prop_map(
                    |(session_id, name, subject, state, answered_count, percent)| SessionSummary {
                        session_id,
                        name,
                        subject,
                        state,
                        answered_count,
                        percent
                    }
                ),
            0..4
        )
        .prop_map(|sessions| WireMessage::Sessions { sessions }),
        (kind, s(), s(), s(), 0usize..50, prop::option::of(percent())).prop_map(
            |(kind, session_id, name, subject, answered_count, percent)| WireMessage::Event(
                SessionEvent {
                    kind,
                    session_id,
                    name,
                    subject,
                    answered_count,
                    percent
                }
            )
        ),
        (code, s()).prop_map(|(code, message)| WireMessage::Error { code, message }),
    ]
}

proptest! {
    #[test]
    fn round_trip(m in message()) {
        let bytes = encode(&m).unwrap();
        prop_assert_eq!(bytes.iter().filter(|&&b| b == b'\n').count(), 1);
        prop_assert_eq!(bytes.last(), Some(&b'\n'));
        prop_assert_eq!(decode(&bytes[..bytes.len() - 1]).unwrap(), m);
    }

    #[test]
    fn framing(ms in prop::collection::vec(message(), 1..8)) {
        let mut stream = Vec::new();
        for m in &ms {
            stream.extend(encode(m).unwrap());
        }
        let frames: Vec<&[u8]> = stream.split(|&b| b == b'\n').filter(|f| !f.is_empty()).collect();
        prop_assert_eq!(frames.len(), ms.len());
        for (f, m) in frames.iter().zip(&ms) {
            prop_assert_eq!(&decode(f).unwrap(), m);
        }
    }
}
