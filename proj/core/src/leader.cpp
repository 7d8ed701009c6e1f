#include "shardchain/leader.hpp"

#include <algorithm>
#include <map>

#include "shardchain/errors.hpp"

namespace shardchain {

WorldState merge_state(const WorldState& base, std::vector<ExecuteShardsResp> responses) {
  std::set<Address> seen;
  for (const auto& resp : responses)
    for (const auto& [addr, acct] : resp.state_slice.entries())
      if (!seen.insert(addr).second) throw MergeConflict("account " + addr.hex() + " returned by two followers");
  WorldState out = base;
  for (auto& resp : responses)
    for (const auto& [addr, acct] : resp.state_slice.entries()) out.put(addr, std::move(resp.state_slice.at(addr)));
  return out;
}

Community::Community(std::vector<Member> members, Options options) : options_(options) {
  std::set<FollowerId> ids;
  for (auto& m : members) {
    if (!ids.insert(m.id).second) throw std::invalid_argument("duplicate follower id " + std::to_string(m.id));
    auto link = std::make_unique<Link>();
    link->id = m.id;
    link->stream = std::move(m.stream);
    links_.push_back(std::move(link));
  }
  for (auto& link : links_) link->reader = std::thread([this, l = link.get()] { receive_loop(*l); });
}

Community::~Community() {
  for (auto& link : links_) link->stream->close();
  for (auto& link : links_)
    if (link->reader.joinable()) link->reader.join();
}

std::vector<FollowerId> Community::follower_ids() const {
  std::vector<FollowerId> out;
  for (const auto& l : links_) out.push_back(l->id);
  return out;
}

std::vector<std::string> Community::faulty_events() const {
  std::lock_guard lk(mu_);
  return faults_;
}

void Community::log_fault(std::string event) { faults_.push_back(std::move(event)); }

void Community::fail_link(Link& link, const std::string& why) {
  {
    std::lock_guard lk(mu_);
    if (!link.dead) {
      link.dead = true;
      link.dead_reason = why;
    }
  }
  link.stream->close();
  cv_.notify_all();
}

void Community::receive_loop(Link& link) {
  try {
    for (;;) {
      auto frame = read_frame(*link.stream);
      {
        std::lock_guard lk(mu_);
        switch (frame.kind) {
          case MessageKind::MineFound:
            if (mining_request_ && frame.request_id == *mining_request_) link.claims.push_back(std::move(frame));
            break;
          case MessageKind::ExecuteShardsResp:
          case MessageKind::Pong:
            if (link.awaiting.erase(frame.request_id) > 0) link.replies.push_back(std::move(frame));
            break;
          default:
            throw ProtocolError(std::string("unexpected ") + kind_name(frame.kind) + " from follower");
        }
      }
      cv_.notify_all();
    }
  } catch (const ProtocolError& e) {
    fail_link(link, std::string("protocol error: ") + e.what());
  } catch (const TransportError& e) {
    fail_link(link, std::string("disconnected: ") + e.what());
  }
}

std::optional<Frame> Community::take_reply(Link& link, std::uint64_t request_id) {
  auto it = std::find_if(link.replies.begin(), link.replies.end(),
                         [&](const Frame& f) { return f.request_id == request_id; });
  if (it == link.replies.end()) return std::nullopt;
  Frame f = std::move(*it);
  link.replies.erase(it);
  return f;
}

ExecutionResult Community::dispatch_execution(const ShardAssignment& assignment, const WorldState& state,
                                              std::uint64_t block_number) {
  if (links_.empty()) throw std::logic_error("dispatch_execution needs at least one follower");

  struct Pending {
    Link* link;
    std::uint64_t request_id;
    const std::vector<Transaction>* txns;
    std::vector<Address> slice_addresses;
  };
  std::vector<Pending> pending;

  auto forget_all = [&] {
    std::lock_guard lk(mu_);
    for (auto& p : pending) {
      p.link->awaiting.erase(p.request_id);
      take_reply(*p.link, p.request_id);
    }
  };

  for (const auto& load : assignment.per_follower) {
    if (load.txns.empty()) continue;
    auto it = std::find_if(links_.begin(), links_.end(), [&](const auto& l) { return l->id == load.follower; });
    if (it == links_.end()) {
      forget_all();
      throw DispatchError(load.follower, "not a community member");
    }
    Link& link = **it;

    std::set<Address> addrs;
    for (const auto& tx : load.txns)
      for (const auto& a : touched_addresses_lenient(tx, DepsMode::Full)) addrs.insert(a);

    ExecuteShardsReq req;
    req.block_number = block_number;
    req.txns = load.txns;
    req.state_slice = state.slice(addrs);

    auto rid = next_request_++;
    {
      std::unique_lock lk(mu_);
      if (link.dead) {
        auto reason = link.dead_reason;
        lk.unlock();
        forget_all();
        throw DispatchError(link.id, reason);
      }
      link.awaiting.insert(rid);
    }
    pending.push_back(Pending{&link, rid, &load.txns, {addrs.begin(), addrs.end()}});
    try {
      write_frame(*link.stream, rid, req);
    } catch (const TransportError& e) {
      fail_link(link, std::string("send failed: ") + e.what());
      forget_all();
      throw DispatchError(link.id, std::string("send failed: ") + e.what());
    }
  }

  auto deadline = Clock::now() + options_.exec_timeout;
  std::vector<ExecuteShardsResp> responses;
  responses.reserve(pending.size());
  for (auto& p : pending) {
    std::optional<Frame> reply;
    {
      std::unique_lock lk(mu_);
      cv_.wait_until(lk, deadline, [&] {
        return std::any_of(p.link->replies.begin(), p.link->replies.end(),
                           [&](const Frame& f) { return f.request_id == p.request_id; }) ||
               p.link->dead;
      });
      reply = take_reply(*p.link, p.request_id);
      if (!reply) {
        auto why = p.link->dead ? p.link->dead_reason : std::string("execution response timed out");
        lk.unlock();
        forget_all();
        throw DispatchError(p.link->id, why);
      }
    }
    auto* resp = std::get_if<ExecuteShardsResp>(&reply->message);
    bool well_formed = resp != nullptr && resp->block_number == block_number &&
                       resp->outcomes.size() == p.txns->size() && resp->state_slice.size() == p.slice_addresses.size();
    if (well_formed) {
      std::size_t i = 0;
      for (const auto& [addr, acct] : resp->state_slice.entries()) well_formed &= addr == p.slice_addresses[i++];
    }
    if (!well_formed) {
      forget_all();
      throw DispatchError(p.link->id, "execution response does not match the request");
    }
    responses.push_back(std::move(*resp));
  }

  ExecutionResult result;
  result.outcomes.resize(assignment.shard_of.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const auto& txns = *pending[i].txns;
    for (std::size_t k = 0; k < txns.size(); ++k) result.outcomes.at(txns[k].tx_id) = std::move(responses[i].outcomes[k]);
  }
  result.state = merge_state(state, std::move(responses));
  return result;
}

MiningResult Community::dispatch_mining(const Block& block, const Target& target) {
  MiningResult result;
  if (links_.empty()) {
    auto r = search_nonce(block, target, SearchPartition{0, 1});
    result.nonce = *r.nonce;
    result.searchers = 1;
    result.local_attempts = r.attempts;
    return result;
  }

  std::vector<Link*> live;
  auto rid = next_request_++;
  {
    std::lock_guard lk(mu_);
    for (auto& l : links_) {
      if (l->dead) continue;
      live.push_back(l.get());
      l->claims.clear();
    }
    mining_request_ = rid;
  }
  if (live.empty()) throw DispatchError(links_.front()->id, "no live followers to mine");

  MineReq req;
  req.block = block;
  req.block.nonce = 0;
  req.target = target;
  req.part.stride = live.size();
  for (std::size_t i = 0; i < live.size(); ++i) {
    req.part.start = i;
    try {
      write_frame(*live[i]->stream, rid, req);
    } catch (const TransportError& e) {
      fail_link(*live[i], std::string("send failed: ") + e.what());
    }
  }
  result.searchers = live.size();

  auto broadcast_cancel = [&] {
    auto cid = next_request_++;
    std::vector<Link*> asked;
    {
      std::lock_guard lk(mu_);
      mining_request_.reset();
      for (auto* l : live)
        if (!l->dead) {
          l->awaiting.insert(cid);
          asked.push_back(l);
        }
    }
    for (auto* l : asked) {
      try {
        write_frame(*l->stream, cid, MineCancel{block.number});
      } catch (const TransportError& e) {
        fail_link(*l, std::string("send failed: ") + e.what());
      }
    }
    std::size_t acks = 0;
    auto ack_deadline = Clock::now() + options_.cancel_ack_timeout;
    std::unique_lock lk(mu_);
    for (auto* l : asked) {
      cv_.wait_until(lk, ack_deadline, [&] {
        return l->dead || std::any_of(l->replies.begin(), l->replies.end(),
                                      [&](const Frame& f) { return f.request_id == cid; });
      });
      if (take_reply(*l, cid)) ++acks;
      l->awaiting.erase(cid);
    }
    return acks;
  };

  Block candidate = block;
  auto deadline = Clock::now() + options_.mine_timeout;
  std::unique_lock lk(mu_);
  for (;;) {
    bool ready = cv_.wait_until(lk, deadline, [&] {
      return std::any_of(live.begin(), live.end(), [](Link* l) { return !l->claims.empty(); }) ||
             std::all_of(live.begin(), live.end(), [](Link* l) { return l->dead; });
    });
    Link* claimant = nullptr;
    for (auto* l : live)
      if (!l->claims.empty()) {
        claimant = l;
        break;
      }
    if (claimant == nullptr) {
      std::string why = ready ? "all followers disconnected while mining" : "mining timed out";
      lk.unlock();
      broadcast_cancel();
      throw DispatchError(live.front()->id, why);
    }
    Frame claim = std::move(claimant->claims.front());
    claimant->claims.pop_front();
    const auto& found = std::get<MineFound>(claim.message);
    candidate.nonce = found.nonce;
    if (found.block_number == block.number && check_pow(candidate, target)) {
      result.nonce = found.nonce;
      result.winner = claimant->id;
      break;
    }
    ++result.rejected_claims;
    log_fault("follower " + std::to_string(claimant->id) + " claimed nonce " + std::to_string(found.nonce) +
              " for block " + std::to_string(found.block_number) + " which does not meet the target");
  }
  lk.unlock();
  result.cancel_acks = broadcast_cancel();
  return result;
}

std::size_t Community::ping_all(std::chrono::milliseconds timeout) {
  auto rid = next_request_++;
  std::vector<Link*> asked;
  {
    std::lock_guard lk(mu_);
    for (auto& l : links_)
      if (!l->dead) {
        l->awaiting.insert(rid);
        asked.push_back(l.get());
      }
  }
  for (auto* l : asked) {
    try {
      write_frame(*l->stream, rid, Ping{l->id});
    } catch (const TransportError& e) {
      fail_link(*l, std::string("send failed: ") + e.what());
    }
  }
  std::size_t ok = 0;
  auto deadline = Clock::now() + timeout;
  std::unique_lock lk(mu_);
  for (auto* l : asked) {
    cv_.wait_until(lk, deadline, [&] {
      return l->dead ||
             std::any_of(l->replies.begin(), l->replies.end(), [&](const Frame& f) { return f.request_id == rid; });
    });
    if (auto f = take_reply(*l, rid); f && std::get_if<Pong>(&f->message)) ++ok;
    l->awaiting.erase(rid);
  }
  return ok;
}

}  // namespace shardchain
