int Global;
int r;

int main() {
  // lock added by RaceFixer
  lock(mutex);
  if( Global == 1 ){
      // unlock added by RaceFixer
      unlock(mutex);
      r = 1;
  }else{
      // unlock added by RaceFixer
      unlock(mutex);
  }
  return r;
}
