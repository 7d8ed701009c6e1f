#include "shardchain/follower.hpp"

#include <mutex>
#include <thread>

#include "shardchain/errors.hpp"

namespace shardchain {

namespace {

/// Serializes writes from the request loop and the mining worker.
class Outbox {
 public:
  explicit Outbox(Stream& s) : s_(s) {}

  void send(std::uint64_t request_id, const Message& msg) {
    std::lock_guard lk(mu_);
    write_frame(s_, request_id, msg);
  }

 private:
  Stream& s_;
  std::mutex mu_;
};

}  // namespace

std::optional<std::string> FollowerService::serve(Stream& stream) {
  Outbox out(stream);
  std::jthread miner;

  auto stop_mining = [&] {
    if (!miner.joinable()) return false;
    bool cancelled = miner.request_stop();
    miner.join();
    return cancelled;
  };

  std::optional<std::string> error;
  try {
    for (;;) {
      auto frame = read_frame(stream);
      std::visit(
          [&](auto& msg) {
            using M = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<M, ExecuteShardsReq>) {
              ++stats_.exec_requests;
              ExecuteShardsResp resp;
              resp.block_number = msg.block_number;
              try {
                auto result = execute_shard(msg.txns, std::move(msg.state_slice), cost_, ExecOptions{.strict_slice = true});
                resp.state_slice = std::move(result.state);
                resp.outcomes = std::move(result.outcomes);
              } catch (const SliceMiss& e) {
                throw ProtocolError(std::string("insufficient state slice: ") + e.what());
              }
              stats_.txns_executed += msg.txns.size();
              out.send(frame.request_id, resp);
            } else if constexpr (std::is_same_v<M, MineReq>) {
              ++stats_.mine_requests;
              if (stop_mining()) ++stats_.searches_cancelled;
              miner = std::jthread([this, &out, req = std::move(msg), rid = frame.request_id](std::stop_token st) {
                try {
                  auto r = search_nonce(req.block, req.target, req.part, st);
                  if (r.nonce) {
                    ++stats_.nonces_found;
                    out.send(rid, MineFound{req.block.number, *r.nonce});
                  }
                } catch (const std::exception&) {
                  // Exhausted or a closed stream; the leader sees silence.
                }
              });
            } else if constexpr (std::is_same_v<M, MineCancel>) {
              ++stats_.cancels_observed;
              if (stop_mining()) ++stats_.searches_cancelled;
              out.send(frame.request_id, Pong{id_});
            } else if constexpr (std::is_same_v<M, Ping>) {
              out.send(frame.request_id, Pong{id_});
            } else {
              throw ProtocolError(std::string("unexpected ") + kind_name(frame.kind) + " from leader");
            }
          },
          frame.message);
    }
  } catch (const ProtocolError& e) {
    ++stats_.protocol_errors;
    error = e.what();
    stream.close();
  } catch (const TransportError&) {
    // Peer went away.
  }
  stop_mining();
  return error;
}

}  // namespace shardchain
