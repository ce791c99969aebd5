//! In-process message channel between prover and verifier.
//!
//! Quantum registers never move: a round keeps one joint state and the
//! transport carries a [`RegisterHandle`] that grants access to one register
//! of it. Handles are not `Clone`, and the transport refuses to deliver an id
//! it has already delivered.

use std::collections::{HashSet, VecDeque};

use crate::protocol::ResponseBit;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Prover,
    Verifier,
}

/// Access right to one register of a round's joint state.
#[derive(Debug, PartialEq, Eq)]
pub struct RegisterHandle {
    id: u64,
    register: usize,
}

impl RegisterHandle {
    /// Builds a handle from raw parts. The transport still rejects a second
    /// delivery of the same id.
    pub fn from_raw(id: u64, register: usize) -> Self {
        RegisterHandle { id, register }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn register(&self) -> usize {
        self.register
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Message {
    Register(RegisterHandle),
    Bit(ResponseBit),
}

#[derive(Debug, Default)]
pub struct Transport {
    to_prover: VecDeque<Message>,
    to_verifier: VecDeque<Message>,
    delivered: HashSet<u64>,
    next_id: u64,
}

impl Transport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mints a handle with a fresh id.
    pub fn issue_handle(&mut self, register: usize) -> RegisterHandle {
        let id = self.next_id;
        self.next_id += 1;
        RegisterHandle { id, register }
    }

    pub fn send(&mut self, to: Role, message: Message) -> Result<()> {
        if let Message::Register(handle) = &message {
            if !self.delivered.insert(handle.id) {
                return Err(Error::NoCloning { id: handle.id });
            }
        }
        match to {
            Role::Prover => self.to_prover.push_back(message),
            Role::Verifier => self.to_verifier.push_back(message),
        }
        Ok(())
    }

    pub fn recv(&mut self, role: Role) -> Result<Message> {
        let queue = match role {
            Role::Prover => &mut self.to_prover,
            Role::Verifier => &mut self.to_verifier,
        };
        queue.pop_front().ok_or_else(|| Error::Transport(format!("{role:?} queue is empty")))
    }

    pub fn recv_register(&mut self, role: Role) -> Result<RegisterHandle> {
        match self.recv(role)? {
            Message::Register(h) => Ok(h),
            Message::Bit(_) => Err(Error::Transport("expected a register, got a bit".into())),
        }
    }

    pub fn recv_bit(&mut self, role: Role) -> Result<ResponseBit> {
        match self.recv(role)? {
            Message::Bit(b) => Ok(b),
            Message::Register(_) => Err(Error::Transport("expected a bit, got a register".into())),
        }
    }

    pub fn pending(&self, role: Role) -> usize {
        match role {
            Role::Prover => self.to_prover.len(),
            Role::Verifier => self.to_verifier.len(),
        }
    }
}
