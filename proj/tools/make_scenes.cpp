// Regenerates the OBJ assets under scenes/. The checked-in files come from
// this tool; rerun it after touching the builders.
#include "echoloc/mesh.hpp"
#include "echoloc/scene_builders.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "scenes";

    using namespace echoloc;
    save_obj(make_box_mesh({0, 0, 0}, {1, 1, 1}, /*outward=*/true), dir + "/cube.obj");
    save_obj(make_shoebox_mesh({7, 7, 3}), dir + "/shoebox.obj");
    save_obj(make_shoebox_mesh({3.5, 3.5, 2.2}), dir + "/room_small.obj");
    save_obj(make_room_with_box(), dir + "/room_box.obj");
    std::printf("wrote cube.obj, shoebox.obj, room_small.obj, room_box.obj to %s/\n", dir.c_str());
    return 0;
}
